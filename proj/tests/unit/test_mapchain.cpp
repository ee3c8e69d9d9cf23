#include "gpmc/diagnostics.hpp"
#include "gpmc/mapchain.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace gpmc;

namespace {

LogDensity gaussian(Eigen::Vector2d mean, Eigen::Matrix2d cov, DensityKind kind) {
  const Eigen::Matrix2d prec = cov.inverse();
  return LogDensity(
      [mean, prec](const Eigen::VectorXd& x) {
        const Eigen::Vector2d d = x - mean;
        return -0.5 * d.dot(prec * d);
      },
      kind);
}

Eigen::Matrix2d target_cov() {
  Eigen::Matrix2d c;
  c << 1.0, 0.5, 0.5, 2.0;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  MapChainConfig cfg;
  CHECK_NOTHROW(cfg.validate(2));
  cfg.r = 0;
  CHECK_THROWS_AS(cfg.validate(2), std::invalid_argument);
  cfg.r = 1;
  cfg.s = 0;
  CHECK_THROWS_AS(cfg.validate(2), std::invalid_argument);
}

TEST_CASE("mapping places the point alone at index 0") {
  LogDensity exact = gaussian({0, 0}, target_cov(), DensityKind::Exact);
  LogDensity sur = gaussian({0.3, 0}, target_cov(), DensityKind::Surrogate);
  const Eigen::VectorXd x = Eigen::Vector2d(0.1, -0.2);
  MarkedChain chain = map_to_chain(x, exact, sur);
  CHECK(chain.size() == 1);
  CHECK(chain.mark() == 0);
  CHECK(chain.at(0).x == x);
  CHECK(chain.at(0).log_exact.has_value());
  CHECK(chain.at(0).log_surrogate == doctest::Approx(sur(x)));
  CHECK_THROWS_AS(chain.set_mark(1), std::out_of_range);
  CHECK_THROWS_AS(chain.at(-1), std::out_of_range);
}

TEST_CASE("non-finite densities are rejected at mapping") {
  LogDensity exact(
      [](const Eigen::VectorXd& x) { return x[0] > 0 ? 0.0 : -std::numeric_limits<double>::infinity(); },
      DensityKind::Exact);
  LogDensity sur([](const Eigen::VectorXd&) { return 0.0; }, DensityKind::Surrogate);
  CHECK_THROWS_AS(map_to_chain(Eigen::VectorXd::Constant(1, -1.0), exact, sur), std::domain_error);
  CHECK_NOTHROW(map_to_chain(Eigen::VectorXd::Constant(1, 1.0), exact, sur));
}

TEST_CASE("extension is deterministic and lazily consumes sweeps") {
  LogDensity exact = gaussian({0, 0}, target_cov(), DensityKind::Exact);
  LogDensity sur = gaussian({0.3, 0}, target_cov(), DensityKind::Surrogate);
  MapChainConfig cfg;
  const Eigen::VectorXd x = Eigen::Vector2d(0.1, -0.2);

  Rng a(1), b(1);
  MarkedChain c1 = map_to_chain(x, exact, sur);
  MarkedChain c2 = map_to_chain(x, exact, sur);
  c1.extend_to(3, sur, cfg, a);
  c2.extend_to(3, sur, cfg, b);
  CHECK(c1.size() == 4);
  CHECK(c1.first_index() == 0);
  CHECK(c1.last_index() == 3);
  CHECK(c1.forward_steps() == 3);
  CHECK(c1.backward_steps() == 0);
  for (std::int64_t k = 0; k <= 3; ++k) CHECK(c1.at(k).x == c2.at(k).x);

  // Three ascending sweeps by hand draw the same numbers.
  Rng manual(1);
  SliceState s{x, sur(x)};
  for (std::int64_t k = 1; k <= 3; ++k) {
    s = sweep(std::move(s), sur, cfg.slice, manual, SweepOrder::Ascending);
    CHECK(c1.at(k).x == s.x);
    CHECK(c1.at(k).log_surrogate == s.log_density);
  }
  CHECK(manual() == a());

  // Already-present indices cost nothing.
  Rng c(99);
  const Rng before = c;
  c1.extend_to(2, sur, cfg, c);
  CHECK(c == before);
}

TEST_CASE("negative indices use descending sweeps") {
  LogDensity exact = gaussian({0, 0}, target_cov(), DensityKind::Exact);
  LogDensity sur = gaussian({0.3, 0}, target_cov(), DensityKind::Surrogate);
  MapChainConfig cfg;
  const Eigen::VectorXd x = Eigen::Vector2d(0.4, 0.5);
  Rng rng(2), manual(2);
  MarkedChain chain = map_to_chain(x, exact, sur);
  chain.extend_to(-2, sur, cfg, rng);
  CHECK(chain.backward_steps() == 2);
  CHECK(chain.first_index() == -2);
  SliceState s{x, sur(x)};
  for (std::int64_t k = -1; k >= -2; --k) {
    s = sweep(std::move(s), sur, cfg.slice, manual, SweepOrder::Descending);
    CHECK(chain.at(k).x == s.x);
  }
}

TEST_CASE("identical exact and surrogate always accept") {
  LogDensity both = gaussian({0, 0}, target_cov(), DensityKind::Exact);
  MapChainConfig cfg;
  Rng rng(3);
  Eigen::VectorXd x = Eigen::Vector2d(0.0, 0.0);
  for (int t = 0; t < 500; ++t) {
    MarkedChain chain = map_to_chain(x, both, both);
    const MarkMove move = move_mark(chain, cfg, both, both, rng);
    REQUIRE(move.log_ratio == 0.0);
    REQUIRE(move.accepted);
    x = chain.at(chain.mark()).x;
  }
}

TEST_CASE("returning to a visited index uses the cache") {
  LogDensity exact = gaussian({0, 0}, target_cov(), DensityKind::Exact);
  LogDensity sur = gaussian({0.5, 0.5}, 2.0 * target_cov(), DensityKind::Surrogate);
  MapChainConfig cfg;
  Rng rng(4);
  MarkedChain chain = map_to_chain(ChainPoint{Eigen::Vector2d(0.1, 0.1), -0.1, -0.2});
  exact.reset_count();
  move_mark_to(chain, 1, cfg, exact, sur, rng);
  CHECK(exact.eval_count() == 1);
  chain.set_mark(1);
  move_mark_to(chain, 0, cfg, exact, sur, rng);
  CHECK(exact.eval_count() == 1);
  move_mark_to(chain, 1, cfg, exact, sur, rng);
  CHECK(exact.eval_count() == 1);
  CHECK(chain.exact_evaluations() == 1);
  // Six lookups in total, only the first at index 1 being fresh.
  CHECK(chain.exact_cache_hits() == 5);
}

TEST_CASE("acceptance against a ratio of e^-1") {
  LogDensity sur([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); }, DensityKind::Surrogate);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.25);
  LogDensity exact(
      [x0](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm() - (x == x0 ? 0.0 : 1.0); },
      DensityKind::Exact);
  MapChainConfig cfg;
  Rng rng(5);
  const int N = 100000;
  int accepted = 0;
  for (int t = 0; t < N; ++t) {
    MarkedChain chain = map_to_chain(x0, exact, sur);
    const MarkMove move = move_mark_to(chain, 1, cfg, exact, sur, rng);
    REQUIRE(move.log_ratio == doctest::Approx(-1.0).epsilon(1e-12));
    accepted += move.accepted;
  }
  const double p = std::exp(-1.0);
  const double rate = static_cast<double>(accepted) / N;
  CHECK(std::abs(rate - p) < 4.0 * std::sqrt(p * (1 - p) / N));
}

TEST_CASE("NaN ratio rejects and ties accept") {
  LogDensity sur([](const Eigen::VectorXd&) { return 0.0; }, DensityKind::Surrogate);
  LogDensity nan_exact([](const Eigen::VectorXd&) { return std::nan(""); }, DensityKind::Exact);
  MapChainConfig cfg;
  Rng rng(6);
  MarkedChain chain = map_to_chain(ChainPoint{Eigen::VectorXd::Zero(1), 0.0, 0.0});
  const MarkMove bad = move_mark_to(chain, 1, cfg, nan_exact, sur, rng);
  CHECK_FALSE(bad.accepted);
  CHECK(chain.mark() == 0);
  LogDensity flat([](const Eigen::VectorXd&) { return 0.0; }, DensityKind::Exact);
  MarkedChain chain2 = map_to_chain(ChainPoint{Eigen::VectorXd::Zero(1), 0.0, 0.0});
  CHECK(move_mark_to(chain2, -1, cfg, flat, sur, rng).accepted);
  CHECK(chain2.mark() == -1);
}

TEST_CASE("transition bookkeeping") {
  LogDensity exact = gaussian({0, 0}, target_cov(), DensityKind::Exact);
  LogDensity sur = gaussian({2.0, -2.0}, 0.3 * target_cov(), DensityKind::Surrogate);
  Rng rng(7);
  MapChainConfig cfg;

  SUBCASE("rejection returns the input") {
    int rejections = 0;
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd x = Eigen::Vector2d(0.1 * t / 200.0, 0.0);
      const MapChainStep step = mapchain_transition(x, cfg, exact, sur, rng);
      CHECK(step.attempts == 1);
      if (step.accepted == 0) {
        ++rejections;
        CHECK(step.next.x == x);
      }
    }
    CHECK(rejections > 0);
  }

  SUBCASE("r marked visits are recorded") {
    cfg.r = 3;
    const MapChainStep step = mapchain_transition(Eigen::VectorXd(Eigen::Vector2d(0, 0)), cfg, exact, sur, rng);
    CHECK(step.marked_visits.size() == 3);
    CHECK(step.attempts == 3);
    CHECK(step.marked_visits.back() == step.next.x);
  }

  SUBCASE("one exact evaluation per transition when r = s = 1") {
    ChainPoint cur{Eigen::Vector2d(0.2, 0.1), 0.0, 0.0};
    cur.log_exact = exact(cur.x);
    cur.log_surrogate = sur(cur.x);
    for (int t = 0; t < 200; ++t) {
      const auto before = exact.eval_count();
      const MapChainStep step = mapchain_transition(cur, cfg, exact, sur, rng);
      REQUIRE(exact.eval_count() - before == 1);
      CHECK(step.next.log_exact == doctest::Approx(exact(step.next.x)));
      cur = step.next;
    }
  }

  SUBCASE("exact evaluations never exceed distinct proposals plus one") {
    cfg.r = 6;
    cfg.s = 2;
    Eigen::VectorXd x = Eigen::Vector2d(0, 0);
    for (int t = 0; t < 100; ++t) {
      const auto before = exact.eval_count();
      const MapChainStep step = mapchain_transition(x, cfg, exact, sur, rng);
      const auto used = exact.eval_count() - before;
      CHECK(used <= static_cast<std::uint64_t>(cfg.r) + 1);
      CHECK(used >= 2);
      x = step.next.x;
    }
  }
}

TEST_CASE("biased surrogate still samples the exact target") {
  // Exact: correlated Gaussian. Surrogate: shifted and overdispersed.
  const Eigen::Vector2d mean(1.0, -0.5);
  const Eigen::Matrix2d cov = target_cov();
  LogDensity exact = gaussian(mean, cov, DensityKind::Exact);
  LogDensity sur = gaussian(mean + Eigen::Vector2d(0.4, 0.3), 1.5 * cov, DensityKind::Surrogate);
  MapChainConfig cfg;
  cfg.slice.w = {1.5};
  Rng rng(8);
  const int N = 100000;
  std::vector<double> a0, a1, a00, a11;
  ChainPoint cur{mean, 0.0, 0.0};
  cur.log_exact = exact(cur.x);
  cur.log_surrogate = sur(cur.x);
  for (int t = 0; t < N; ++t) {
    cur = mapchain_transition(cur, cfg, exact, sur, rng).next;
    a0.push_back(cur.x[0]);
    a1.push_back(cur.x[1]);
    a00.push_back(cur.x[0] * cur.x[0]);
    a11.push_back(cur.x[1] * cur.x[1]);
  }

  // Random-walk Metropolis reference on the same target.
  std::vector<double> b0, b1, b00, b11;
  Eigen::VectorXd y = mean;
  double ly = exact(y);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 4 * N; ++t) {
    const Eigen::VectorXd prop = y + 1.2 * Eigen::Vector2d(z(rng), z(rng));
    const double lp = exact(prop);
    if (std::log(u(rng)) < lp - ly) {
      y = prop;
      ly = lp;
    }
    if (t % 4 == 0) {
      b0.push_back(y[0]);
      b1.push_back(y[1]);
      b00.push_back(y[0] * y[0]);
      b11.push_back(y[1] * y[1]);
    }
  }

  auto agree = [](const std::vector<double>& a, const std::vector<double>& b) {
    const MeanEstimate ea = mcmc_mean(a);
    const MeanEstimate eb = mcmc_mean(b);
    const double se = std::sqrt(ea.std_error * ea.std_error + eb.std_error * eb.std_error);
    return std::abs(ea.mean - eb.mean) < 3.0 * se;
  };
  CHECK(agree(a0, b0));
  CHECK(agree(a1, b1));
  CHECK(agree(a00, b00));
  CHECK(agree(a11, b11));
}
