#pragma once

#include "gpmc/exact_posterior.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace gpmc {

using Rng = std::mt19937_64;

/// Step size w (per coordinate, or one value for all) and the stepping-out
/// cap M, so the initial interval never grows beyond M*w.
struct SliceConfig {
  std::vector<double> w{1.0};
  int max_steps = 10;

  double width(Eigen::Index i) const {
    return w.size() == 1 ? w.front() : w.at(static_cast<std::size_t>(i));
  }
  void validate(Eigen::Index dim) const;
};

/// A point together with the log density of the target at that point.
struct SliceState {
  Eigen::VectorXd x;
  double log_density = 0.0;
};

/// One univariate slice-sampling update of coordinate i: vertical level,
/// randomly placed initial interval, stepping out, then shrinkage.
/// Throws std::domain_error if the current log density is not finite.
SliceState slice_update_coord(SliceState current, Eigen::Index i, LogDensity& target,
                              const SliceConfig& cfg, Rng& rng);

enum class SweepOrder {
  Ascending,    // S_1 S_2 ... S_d
  Descending,   // S_d ... S_1, the reversal of Ascending
  Palindromic,  // S_1 ... S_d ... S_1, reversible on its own
};

SweepOrder reversed(SweepOrder order);

SliceState sweep(SliceState current, LogDensity& target, const SliceConfig& cfg,
                 Rng& rng, SweepOrder order = SweepOrder::Ascending);
SliceState sweep(const Eigen::VectorXd& x, LogDensity& target, const SliceConfig& cfg,
                 Rng& rng, SweepOrder order = SweepOrder::Ascending);

}  // namespace gpmc
