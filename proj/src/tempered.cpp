#include "gpmc/tempered.hpp"

#include <stdexcept>

namespace gpmc {

void Ladder::validate(Eigen::Index dim) const {
  if (levels.empty()) throw std::invalid_argument("ladder needs at least one level");
  for (const LadderLevel& level : levels) {
    if (level.repeats < 1) throw std::invalid_argument("level repeat count must be >= 1");
    level.slice.validate(dim);
  }
}

namespace {

using Vec = Eigen::VectorXd;

Scored<Vec> repeated_sweeps(Scored<Vec> start, LadderLevel& level, SweepOrder order,
                            Rng& rng) {
  SliceState state{std::move(start.x), start.log_density};
  for (int k = 0; k < level.repeats; ++k) {
    state = sweep(std::move(state), level.density, level.slice, rng, order);
  }
  return Scored<Vec>{std::move(state.x), state.log_density};
}

}  // namespace

TemperedStep tempered_transition(const Eigen::VectorXd& x, double log_exact,
                                 LogDensity& exact, Ladder& ladder, Rng& rng) {
  ladder.validate(x.size());
  std::vector<TemperingLevel<Vec>> levels;
  levels.reserve(ladder.depth() + 1);
  levels.push_back({[&exact](const Vec& v) { return exact(v); }, {}, {}});
  const SweepOrder up = ladder.up_order;
  const SweepOrder down = reversed(up);
  for (LadderLevel& level : ladder.levels) {
    levels.push_back(
        {[&level](const Vec& v) { return level.density(v); },
         [&level, up](Scored<Vec> s, Rng& g) { return repeated_sweeps(std::move(s), level, up, g); },
         [&level, down](Scored<Vec> s, Rng& g) {
           return repeated_sweeps(std::move(s), level, down, g);
         }});
  }
  TemperedOutcome<Vec> out = run_tempered(x, log_exact, levels, rng);
  return TemperedStep{std::move(out.next), out.next_log_base, out.accepted, out.log_acc,
                      std::move(out.path), std::move(out.diagnostic)};
}

TemperedStep tempered_transition(const Eigen::VectorXd& x, LogDensity& exact,
                                 Ladder& ladder, Rng& rng) {
  return tempered_transition(x, exact(x), exact, ladder, rng);
}

LadderDiagnostics ladder_validate(Ladder& ladder, LogDensity& exact,
                                  const Eigen::VectorXd& probe) {
  if (probe.size() == 0) throw std::invalid_argument("ladder probe point is empty");
  ladder.validate(probe.size());
  LadderDiagnostics out;
  const double base = exact(probe);
  out.cost_flops.push_back(exact.cost_flops());
  out.abs_log_gap.push_back(0.0);
  for (std::size_t i = 0; i < ladder.levels.size(); ++i) {
    LadderLevel& level = ladder.levels[i];
    out.cost_flops.push_back(level.density.cost_flops());
    out.abs_log_gap.push_back(std::abs(level.density(probe) - base));
    if (!(out.cost_flops[i + 1] < out.cost_flops[i])) {
      out.warnings.push_back("level " + std::to_string(i + 1) +
                             " is not cheaper than level " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace gpmc
