#include "gpmc/slice_sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gpmc {

void SliceConfig::validate(Eigen::Index dim) const {
  if (w.empty() || (w.size() != 1 && static_cast<Eigen::Index>(w.size()) != dim)) {
    throw std::invalid_argument("slice widths must have 1 or " + std::to_string(dim) +
                                " entries");
  }
  for (double wi : w) {
    if (!(wi > 0.0) || !std::isfinite(wi)) {
      throw std::invalid_argument("slice widths must be positive");
    }
  }
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
}

SliceState slice_update_coord(SliceState current, Eigen::Index i, LogDensity& target,
                              const SliceConfig& cfg, Rng& rng) {
  if (!std::isfinite(current.log_density)) {
    throw std::domain_error("slice update started from a point with non-finite density");
  }
  if (i < 0 || i >= current.x.size()) throw std::out_of_range("coordinate out of range");

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const double w = cfg.width(i);
  const double x0 = current.x[i];
  const double level = current.log_density - expo(rng);

  Eigen::VectorXd probe = current.x;
  auto log_at = [&](double value) {
    probe[i] = value;
    return target(probe);
  };

  double left = x0 - w * unif(rng);
  double right = left + w;
  int left_steps = static_cast<int>(std::floor(cfg.max_steps * unif(rng)));
  int right_steps = cfg.max_steps - 1 - left_steps;
  while (left_steps > 0 && level < log_at(left)) {
    left -= w;
    --left_steps;
  }
  while (right_steps > 0 && level < log_at(right)) {
    right += w;
    --right_steps;
  }

  for (;;) {
    const double candidate = left + unif(rng) * (right - left);
    const double lp = log_at(candidate);
    if (level < lp) {
      current.x[i] = candidate;
      current.log_density = lp;
      return current;
    }
    if (candidate < x0) {
      left = candidate;
    } else {
      right = candidate;
    }
    if (!(right - left > 0.0)) {
      throw std::runtime_error("slice shrinkage collapsed onto the current point");
    }
  }
}

SweepOrder reversed(SweepOrder order) {
  switch (order) {
    case SweepOrder::Ascending: return SweepOrder::Descending;
    case SweepOrder::Descending: return SweepOrder::Ascending;
    case SweepOrder::Palindromic: return SweepOrder::Palindromic;
  }
  return order;
}

SliceState sweep(SliceState current, LogDensity& target, const SliceConfig& cfg,
                 Rng& rng, SweepOrder order) {
  const Eigen::Index d = current.x.size();
  switch (order) {
    case SweepOrder::Ascending:
      for (Eigen::Index i = 0; i < d; ++i) {
        current = slice_update_coord(std::move(current), i, target, cfg, rng);
      }
      break;
    case SweepOrder::Descending:
      for (Eigen::Index i = d - 1; i >= 0; --i) {
        current = slice_update_coord(std::move(current), i, target, cfg, rng);
      }
      break;
    case SweepOrder::Palindromic:
      for (Eigen::Index i = 0; i < d; ++i) {
        current = slice_update_coord(std::move(current), i, target, cfg, rng);
      }
      for (Eigen::Index i = d - 2; i >= 0; --i) {
        current = slice_update_coord(std::move(current), i, target, cfg, rng);
      }
      break;
  }
  return current;
}

SliceState sweep(const Eigen::VectorXd& x, LogDensity& target, const SliceConfig& cfg,
                 Rng& rng, SweepOrder order) {
  const double lp = target(x);
  return sweep(SliceState{x, lp}, target, cfg, rng, order);
}

}  // namespace gpmc
