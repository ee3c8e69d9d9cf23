#include "gpmc/mapchain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gpmc {

void MapChainConfig::validate(Eigen::Index dim) const {
  if (r < 1) throw std::invalid_argument("r must be at least 1");
  if (s < 1) throw std::invalid_argument("s must be at least 1");
  slice.validate(dim);
}

MarkedChain::MarkedChain(const ChainPoint& origin) {
  if (!std::isfinite(origin.log_exact) || !std::isfinite(origin.log_surrogate)) {
    throw std::domain_error("chain origin must have finite exact and surrogate densities");
  }
  states_.emplace(0, State{origin.x, origin.log_surrogate, origin.log_exact});
}

void MarkedChain::set_mark(std::int64_t index) {
  if (!contains(index)) {
    throw std::out_of_range("mark index " + std::to_string(index) + " not simulated");
  }
  mark_ = index;
}

const MarkedChain::State& MarkedChain::at(std::int64_t index) const {
  const auto it = states_.find(index);
  if (it == states_.end()) {
    throw std::out_of_range("chain index " + std::to_string(index) + " not simulated");
  }
  return it->second;
}

void MarkedChain::extend_to(std::int64_t index, LogDensity& surrogate,
                            const MapChainConfig& cfg, Rng& rng) {
  while (last_index() < index) {
    const State& tail = states_.rbegin()->second;
    SliceState next = sweep(SliceState{tail.x, tail.log_surrogate}, surrogate, cfg.slice,
                            rng, cfg.forward_order);
    states_.emplace(last_index() + 1, State{std::move(next.x), next.log_density, {}});
    ++forward_steps_;
  }
  while (first_index() > index) {
    const State& head = states_.begin()->second;
    SliceState next = sweep(SliceState{head.x, head.log_surrogate}, surrogate, cfg.slice,
                            rng, reversed(cfg.forward_order));
    states_.emplace(first_index() - 1, State{std::move(next.x), next.log_density, {}});
    ++backward_steps_;
  }
}

double MarkedChain::log_exact_at(std::int64_t index, LogDensity& exact) {
  const auto it = states_.find(index);
  if (it == states_.end()) {
    throw std::out_of_range("chain index " + std::to_string(index) + " not simulated");
  }
  State& state = it->second;
  if (state.log_exact) {
    ++exact_cache_hits_;
  } else {
    state.log_exact = exact(state.x);
    ++exact_evaluations_;
  }
  return *state.log_exact;
}

MarkedChain map_to_chain(const Eigen::VectorXd& x, LogDensity& exact,
                         LogDensity& surrogate) {
  return MarkedChain(ChainPoint{x, exact(x), surrogate(x)});
}

MarkedChain map_to_chain(const ChainPoint& point) { return MarkedChain(point); }

MarkMove move_mark_to(MarkedChain& chain, std::int64_t target, const MapChainConfig& cfg,
                      LogDensity& exact, LogDensity& surrogate, Rng& rng) {
  MarkMove move;
  move.from = chain.mark();
  move.to = target;
  chain.extend_to(target, surrogate, cfg, rng);

  const double from_exact = chain.log_exact_at(move.from, exact);
  const double to_exact = chain.log_exact_at(target, exact);
  const double from_weight = from_exact - chain.at(move.from).log_surrogate;
  const double to_weight = to_exact - chain.at(target).log_surrogate;
  move.log_ratio = to_weight - from_weight;

  if (std::isnan(move.log_ratio)) {
    move.accepted = false;
  } else if (move.log_ratio >= 0.0) {
    move.accepted = true;
  } else {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    move.accepted = std::log(unif(rng)) < move.log_ratio;
  }
  if (move.accepted) chain.set_mark(target);
  return move;
}

MarkMove move_mark(MarkedChain& chain, const MapChainConfig& cfg, LogDensity& exact,
                   LogDensity& surrogate, Rng& rng) {
  std::bernoulli_distribution forward(0.5);
  const std::int64_t offset = forward(rng) ? cfg.s : -cfg.s;
  return move_mark_to(chain, chain.mark() + offset, cfg, exact, surrogate, rng);
}

MapChainStep mapchain_transition(const ChainPoint& current, const MapChainConfig& cfg,
                                 LogDensity& exact, LogDensity& surrogate, Rng& rng) {
  cfg.validate(current.x.size());
  MarkedChain chain = map_to_chain(current);
  MapChainStep step;
  step.marked_visits.reserve(static_cast<std::size_t>(cfg.r));
  for (int attempt = 0; attempt < cfg.r; ++attempt) {
    const MarkMove move = move_mark(chain, cfg, exact, surrogate, rng);
    ++step.attempts;
    if (move.accepted) ++step.accepted;
    step.marked_visits.push_back(chain.at(chain.mark()).x);
  }
  const MarkedChain::State& marked = chain.at(chain.mark());
  step.next = ChainPoint{marked.x, *marked.log_exact, marked.log_surrogate};
  return step;
}

MapChainStep mapchain_transition(const Eigen::VectorXd& x, const MapChainConfig& cfg,
                                 LogDensity& exact, LogDensity& surrogate, Rng& rng) {
  return mapchain_transition(ChainPoint{x, exact(x), surrogate(x)}, cfg, exact,
                             surrogate, rng);
}

}  // namespace gpmc
