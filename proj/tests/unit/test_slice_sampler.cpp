#include "gpmc/diagnostics.hpp"
#include "gpmc/slice_sampler.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace gpmc;

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

LogDensity density(std::function<double(const Eigen::VectorXd&)> f) {
  return LogDensity(std::move(f), DensityKind::Exact);
}

}  // namespace

TEST_CASE("slice config validation") {
  SliceConfig cfg;
  CHECK_NOTHROW(cfg.validate(3));
  cfg.w = {1.0, 2.0};
  CHECK_THROWS_AS(cfg.validate(3), std::invalid_argument);
  CHECK_NOTHROW(cfg.validate(2));
  CHECK(cfg.width(1) == 2.0);
  cfg.w = {0.0};
  CHECK_THROWS_AS(cfg.validate(1), std::invalid_argument);
  cfg.w = {1.0};
  cfg.max_steps = 0;
  CHECK_THROWS_AS(cfg.validate(1), std::invalid_argument);
}

TEST_CASE("flat target stays within the stepping-out cap") {
  LogDensity flat = density([](const Eigen::VectorXd&) { return 0.0; });
  SliceConfig cfg;
  cfg.w = {0.5};
  cfg.max_steps = 6;
  Rng rng(1);
  for (int t = 0; t < 2000; ++t) {
    const SliceState out = slice_update_coord({Eigen::VectorXd::Constant(1, 3.0), 0.0}, 0, flat, cfg, rng);
    CHECK(out.x[0] >= 3.0 - 6 * 0.5);
    CHECK(out.x[0] <= 3.0 + 6 * 0.5);
  }
}

TEST_CASE("bounded support is preserved") {
  LogDensity box = density([](const Eigen::VectorXd& x) { return (x[0] >= 0 && x[0] <= 1) ? 0.0 : kNegInf; });
  SliceConfig cfg;
  Rng rng(2);
  SliceState s{Eigen::VectorXd::Constant(1, 0.5), 0.0};
  double lo = 1, hi = 0;
  for (int t = 0; t < 20000; ++t) {
    s = slice_update_coord(s, 0, box, cfg, rng);
    REQUIRE(s.x[0] >= 0.0);
    REQUIRE(s.x[0] <= 1.0);
    lo = std::min(lo, s.x[0]);
    hi = std::max(hi, s.x[0]);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("standard normal long run") {
  LogDensity normal = density([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); });
  SliceConfig cfg;
  Rng rng(3);
  SliceState s{Eigen::VectorXd::Zero(1), 0.0};
  double sum = 0.0, sum2 = 0.0;
  const int N = 100000;
  for (int t = 0; t < N; ++t) {
    s = slice_update_coord(s, 0, normal, cfg, rng);
    CHECK(s.log_density == -0.5 * s.x[0] * s.x[0]);
    sum += s.x[0];
    sum2 += s.x[0] * s.x[0];
  }
  const double mean = sum / N;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(sum2 / N - mean * mean - 1.0) < 0.05);
}

TEST_CASE("ascending and descending sweeps coincide in one dimension") {
  LogDensity normal = density([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); });
  SliceConfig cfg;
  Rng a(4), b(4);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.3);
  Eigen::VectorXd y = x;
  for (int t = 0; t < 100; ++t) {
    x = sweep(x, normal, cfg, a, SweepOrder::Ascending).x;
    y = sweep(y, normal, cfg, b, SweepOrder::Descending).x;
    REQUIRE(x == y);
  }
  CHECK(reversed(SweepOrder::Ascending) == SweepOrder::Descending);
  CHECK(reversed(SweepOrder::Descending) == SweepOrder::Ascending);
  CHECK(reversed(SweepOrder::Palindromic) == SweepOrder::Palindromic);
}

TEST_CASE("correlated Gaussian covariance is recovered") {
  const double rho = 0.8;
  Eigen::Matrix2d cov;
  cov << 1.0, rho * 2.0, rho * 2.0, 4.0;
  const Eigen::Matrix2d prec = cov.inverse();
  LogDensity target = density([prec](const Eigen::VectorXd& x) { return -0.5 * x.dot(prec * x); });
  SliceConfig cfg;
  cfg.w = {1.0, 2.0};
  Rng rng(5);
  SliceState s{Eigen::VectorXd::Zero(2), 0.0};
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  const int N = 100000;
  for (int t = 0; t < N; ++t) {
    s = sweep(std::move(s), target, cfg, rng, t % 2 ? SweepOrder::Ascending : SweepOrder::Descending);
    sum += s.x;
    outer += s.x * s.x.transpose();
  }
  const Eigen::Vector2d mean = sum / N;
  const Eigen::Matrix2d est = outer / N - mean * mean.transpose();
  CHECK(std::abs(est(0, 0) / cov(0, 0) - 1.0) < 0.05);
  CHECK(std::abs(est(1, 1) / cov(1, 1) - 1.0) < 0.05);
  CHECK(std::abs(est(0, 1) / cov(0, 1) - 1.0) < 0.05);
}

TEST_CASE("each coordinate update evaluates the density at least twice") {
  LogDensity normal = density([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); });
  SliceConfig cfg;
  Rng rng(6);
  SliceState s{Eigen::VectorXd::Zero(4), 0.0};
  for (int t = 0; t < 200; ++t) {
    const auto before = normal.eval_count();
    s = sweep(std::move(s), normal, cfg, rng, SweepOrder::Ascending);
    CHECK(normal.eval_count() - before >= 2u * 4u);
  }
}

TEST_CASE("palindromic sweep reduces to a single update in one dimension") {
  LogDensity normal = density([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); });
  SliceConfig cfg;
  Rng a(7), b(7);
  const SliceState s{Eigen::VectorXd::Constant(1, 0.2), -0.02};
  const SliceState pal = sweep(s, normal, cfg, a, SweepOrder::Palindromic);
  const SliceState one = slice_update_coord(s, 0, normal, cfg, b);
  CHECK(pal.x == one.x);
  CHECK(a() == b());
}

TEST_CASE("palindromic sweep updates 2d-1 coordinates") {
  std::vector<int> hits(3, 0);
  Eigen::VectorXd last = Eigen::VectorXd::Zero(3);
  LogDensity normal = density([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); });
  SliceConfig cfg;
  Rng rng(11);
  const SliceState out = sweep(SliceState{Eigen::VectorXd::Zero(3), 0.0}, normal, cfg, rng, SweepOrder::Palindromic);
  CHECK(out.x.size() == 3);
  CHECK(out.log_density == doctest::Approx(-0.5 * out.x.squaredNorm()));
  Rng manual(11);
  SliceState m{Eigen::VectorXd::Zero(3), 0.0};
  for (Eigen::Index i : {0, 1, 2, 1, 0}) m = slice_update_coord(m, i, normal, cfg, manual);
  CHECK(m.x == out.x);
}

TEST_CASE("non-finite current density is rejected") {
  LogDensity normal = density([](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); });
  SliceConfig cfg;
  Rng rng(8);
  CHECK_THROWS_AS(slice_update_coord({Eigen::VectorXd::Zero(1), kNegInf}, 0, normal, cfg, rng), std::domain_error);
  CHECK_THROWS_AS(slice_update_coord({Eigen::VectorXd::Zero(1), std::nan("")}, 0, normal, cfg, rng),
                  std::domain_error);
  CHECK_THROWS_AS(slice_update_coord({Eigen::VectorXd::Zero(1), 0.0}, 1, normal, cfg, rng), std::out_of_range);
}

TEST_CASE("single update leaves a step-function target invariant") {
  // Piecewise-constant density on 31 unit cells; draws start exactly from the
  // target, so one update must return target-distributed cells.
  const int K = 31;
  std::vector<double> weight(K);
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    weight[k] = 1.0 + 0.8 * std::sin(0.7 * k) + 0.02 * k;
    total += weight[k];
  }
  LogDensity target = density([&](const Eigen::VectorXd& x) {
    if (!(x[0] >= 0.0 && x[0] < K)) return kNegInf;
    return std::log(weight[static_cast<int>(x[0])]);
  });
  SliceConfig cfg;
  cfg.w = {3.0};
  cfg.max_steps = 5;
  Rng rng(9);
  std::discrete_distribution<int> pick(weight.begin(), weight.end());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> counts(K, 0.0);
  const int N = 1000000;
  for (int t = 0; t < N; ++t) {
    const int cell = pick(rng);
    const double x0 = cell + unif(rng);
    const SliceState out = slice_update_coord({Eigen::VectorXd::Constant(1, x0), std::log(weight[cell])}, 0,
                                              target, cfg, rng);
    counts[static_cast<int>(out.x[0])] += 1.0;
  }
  double chi2 = 0.0;
  for (int k = 0; k < K; ++k) {
    const double expect = N * weight[k] / total;
    chi2 += (counts[k] - expect) * (counts[k] - expect) / expect;
  }
  // Upper 0.001 point of chi-square with 30 degrees of freedom.
  CHECK(chi2 < 59.70);
}

TEST_CASE("a sweep maps target draws to target draws") {
  const double rho = 0.6;
  Eigen::Matrix2d cov;
  cov << 1.0, rho, rho, 1.0;
  const Eigen::Matrix2d prec = cov.inverse();
  const Eigen::Matrix2d L = cov.llt().matrixL();
  LogDensity target = density([prec](const Eigen::VectorXd& x) { return -0.5 * x.dot(prec * x); });
  SliceConfig cfg;
  Rng rng(10);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> moved0, moved1, fresh0, fresh1;
  for (int t = 0; t < 10000; ++t) {
    const Eigen::Vector2d x = L * Eigen::Vector2d(z(rng), z(rng));
    const SliceState out = sweep(Eigen::VectorXd(x), target, cfg, rng);
    moved0.push_back(out.x[0]);
    moved1.push_back(out.x[1]);
    const Eigen::Vector2d f = L * Eigen::Vector2d(z(rng), z(rng));
    fresh0.push_back(f[0]);
    fresh1.push_back(f[1]);
  }
  CHECK(ks_two_sample(moved0, fresh0).p_value > 0.01);
  CHECK(ks_two_sample(moved1, fresh1).p_value > 0.01);
}
