#pragma once

#include "gpmc/slice_sampler.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace gpmc {

/// Tuning for the discretizing-chain transition.
///
/// `r` mark moves are attempted per mapping, each proposing an offset of
/// `s` steps forward or backward. The chain step R is one slice sweep in
/// `forward_order` targeting the surrogate; its reversal (used for negative
/// indices) is the sweep in the reversed order.
struct MapChainConfig {
  int r = 1;
  int s = 1;
  SliceConfig slice;
  SweepOrder forward_order = SweepOrder::Ascending;

  void validate(Eigen::Index dim) const;
};

/// A point with both log densities already known.
struct ChainPoint {
  Eigen::VectorXd x;
  double log_exact = 0.0;
  double log_surrogate = 0.0;
};

/// A lazily simulated realization of the surrogate-invariant chain, indexed
/// by signed integers around the origin (index 0), with a mark.
class MarkedChain {
 public:
  struct State {
    Eigen::VectorXd x;
    double log_surrogate = 0.0;
    std::optional<double> log_exact;
  };

  explicit MarkedChain(const ChainPoint& origin);

  std::int64_t mark() const { return mark_; }
  void set_mark(std::int64_t index);

  bool contains(std::int64_t index) const { return states_.count(index) != 0; }
  const State& at(std::int64_t index) const;
  std::int64_t first_index() const { return states_.begin()->first; }
  std::int64_t last_index() const { return states_.rbegin()->first; }
  std::size_t size() const { return states_.size(); }

  /// Simulates forward (R) or backward (reversed R) steps until `index` is
  /// present. Steps are only simulated on demand.
  void extend_to(std::int64_t index, LogDensity& surrogate, const MapChainConfig& cfg,
                 Rng& rng);

  /// log pi at a stored index, evaluated at most once per index.
  double log_exact_at(std::int64_t index, LogDensity& exact);

  std::uint64_t exact_evaluations() const { return exact_evaluations_; }
  std::uint64_t exact_cache_hits() const { return exact_cache_hits_; }
  std::uint64_t forward_steps() const { return forward_steps_; }
  std::uint64_t backward_steps() const { return backward_steps_; }

 private:
  std::map<std::int64_t, State> states_;
  std::int64_t mark_ = 0;
  std::uint64_t exact_evaluations_ = 0;
  std::uint64_t exact_cache_hits_ = 0;
  std::uint64_t forward_steps_ = 0;
  std::uint64_t backward_steps_ = 0;
};

/// Places x at index 0 with the mark on it. Throws std::domain_error on a
/// non-finite density.
MarkedChain map_to_chain(const Eigen::VectorXd& x, LogDensity& exact,
                         LogDensity& surrogate);
MarkedChain map_to_chain(const ChainPoint& point);

struct MarkMove {
  std::int64_t from = 0;
  std::int64_t to = 0;
  double log_ratio = 0.0;  // log[pi/pi*](x_to) - log[pi/pi*](x_from)
  bool accepted = false;
};

/// One Metropolis attempt: propose mark +/- s with equal probability.
MarkMove move_mark(MarkedChain& chain, const MapChainConfig& cfg, LogDensity& exact,
                   LogDensity& surrogate, Rng& rng);

/// Metropolis attempt with a given proposed index (the proposal draw is the
/// caller's responsibility).
MarkMove move_mark_to(MarkedChain& chain, std::int64_t target, const MapChainConfig& cfg,
                      LogDensity& exact, LogDensity& surrogate, Rng& rng);

struct MapChainStep {
  ChainPoint next;
  std::vector<Eigen::VectorXd> marked_visits;  // mark state after each attempt
  int accepted = 0;
  int attempts = 0;
};

/// Map to a fresh chain realization, make r mark moves, return the marked
/// state. Carrying `current` forward keeps the exact density of the current
/// point from being recomputed.
MapChainStep mapchain_transition(const ChainPoint& current, const MapChainConfig& cfg,
                                 LogDensity& exact, LogDensity& surrogate, Rng& rng);
MapChainStep mapchain_transition(const Eigen::VectorXd& x, const MapChainConfig& cfg,
                                 LogDensity& exact, LogDensity& surrogate, Rng& rng);

}  // namespace gpmc
