#pragma once

#include "gpmc/mapchain.hpp"
#include "gpmc/slice_sampler.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace gpmc {

/// A state together with the log density of one particular level at it.
template <class State>
struct Scored {
  State x;
  double log_density = 0.0;
};

/// One rung of a tempering ladder over an arbitrary state type. `up` and
/// `down` must be mutually reversible with respect to `log_density`; both
/// receive and return the level density at the state. Level 0 only needs
/// `log_density`.
template <class State>
struct TemperingLevel {
  std::function<double(const State&)> log_density;
  std::function<Scored<State>(Scored<State>, Rng&)> up;
  std::function<Scored<State>(Scored<State>, Rng&)> down;
};

/// Outcome of one tempered transition. `path` holds x_hat_0 .. x_hat_{n-1},
/// x_bar_n, x_check_{n-1} .. x_check_0, so x_check_j sits at path[2n - j].
template <class State>
struct TemperedOutcome {
  std::vector<State> path;
  State next;
  double next_log_base = 0.0;  // level-0 log density at `next`
  double log_acc = 0.0;
  bool accepted = false;
  std::string diagnostic;  // set when a non-finite density forced rejection
};

/// The acceptance log-ratio of a flip, recomputed from scratch on a stored
/// path. `densities[i]` is the level-i log density.
template <class State>
double flip_log_ratio(const std::vector<State>& path,
                      const std::vector<std::function<double(const State&)>>& densities) {
  const std::size_t n = densities.size() - 1;
  if (densities.size() < 2 || path.size() != 2 * n + 1) {
    throw std::invalid_argument("path length must be 2n+1 for an n-level ladder");
  }
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    total += densities[i](path[i - 1]) - densities[i - 1](path[i - 1]);
  }
  for (std::size_t i = n; i >= 1; --i) {
    const State& check = path[2 * n - (i - 1)];
    total += densities[i - 1](check) - densities[i](check);
  }
  return total;
}

/// Up pass through levels 1..n, down pass back to 0, then a single
/// Metropolis decision on the flip. Every density in the acceptance sum is
/// evaluated once; values produced by the level transitions are reused.
template <class State>
TemperedOutcome<State> run_tempered(const State& x, double log_base,
                                    std::vector<TemperingLevel<State>>& levels, Rng& rng) {
  if (levels.size() < 2) throw std::invalid_argument("ladder needs at least one level");
  if (!std::isfinite(log_base)) {
    throw std::domain_error("tempered transition started from a non-finite density");
  }
  const std::size_t n = levels.size() - 1;
  TemperedOutcome<State> out;
  out.path.reserve(2 * n + 1);
  out.next = x;
  out.next_log_base = log_base;

  auto reject = [&](std::string why) {
    out.accepted = false;
    out.diagnostic = std::move(why);
    out.next = x;
    out.next_log_base = log_base;
    return out;
  };

  // Up pass: cur holds x_hat_{i-1} scored under level i-1.
  Scored<State> cur{x, log_base};
  for (std::size_t i = 1; i <= n; ++i) {
    out.path.push_back(cur.x);
    const double upper = levels[i].log_density(cur.x);
    out.log_acc += upper - cur.log_density;
    if (!std::isfinite(upper)) {
      return reject("non-finite level-" + std::to_string(i) + " density on the up pass");
    }
    cur = levels[i].up(Scored<State>{std::move(cur.x), upper}, rng);
  }
  // cur is x_bar_n scored under level n.
  for (std::size_t i = n; i >= 1; --i) {
    if (i == n) out.path.push_back(cur.x);
    cur = levels[i].down(std::move(cur), rng);
    out.path.push_back(cur.x);
    const double lower = levels[i - 1].log_density(cur.x);
    out.log_acc += lower - cur.log_density;
    if (!std::isfinite(lower)) {
      return reject("non-finite level-" + std::to_string(i - 1) +
                    " density on the down pass");
    }
    cur.log_density = lower;
  }

  if (std::isnan(out.log_acc)) return reject("acceptance log-ratio is NaN");
  if (out.log_acc >= 0.0) {
    out.accepted = true;
  } else {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    out.accepted = std::log(unif(rng)) < out.log_acc;
  }
  if (out.accepted) {
    out.next = cur.x;
    out.next_log_base = cur.log_density;
  }
  return out;
}

/// One surrogate rung: base transition is `repeats` slice sweeps.
struct LadderLevel {
  LogDensity density;
  int repeats = 1;
  SliceConfig slice;
};

/// Surrogates pi_1..pi_n; level 0 is the exact density supplied per call.
/// Up sweeps use `up_order`, down sweeps its reversal.
struct Ladder {
  std::vector<LadderLevel> levels;
  SweepOrder up_order = SweepOrder::Ascending;

  std::size_t depth() const { return levels.size(); }
  void validate(Eigen::Index dim) const;
};

struct TemperedStep {
  Eigen::VectorXd x;
  double log_exact = 0.0;
  bool accepted = false;
  double log_acc = 0.0;
  std::vector<Eigen::VectorXd> path;
  std::string diagnostic;
};

TemperedStep tempered_transition(const Eigen::VectorXd& x, double log_exact,
                                 LogDensity& exact, Ladder& ladder, Rng& rng);
TemperedStep tempered_transition(const Eigen::VectorXd& x, LogDensity& exact,
                                 Ladder& ladder, Rng& rng);

struct LadderDiagnostics {
  std::vector<double> cost_flops;         // index 0 is the exact density
  std::vector<double> abs_log_gap;        // |log pi_i - log pi_0| at the probe
  std::vector<std::string> warnings;
};

/// Cost estimates and probe-point discrepancies per level. Warns whenever a
/// level is not cheaper than the one above it.
LadderDiagnostics ladder_validate(Ladder& ladder, LogDensity& exact,
                                  const Eigen::VectorXd& probe);

}  // namespace gpmc
