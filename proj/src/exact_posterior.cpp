#include "gpmc/exact_posterior.hpp"

#include <cmath>
#include <sstream>

namespace gpmc {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

thread_local LinalgCounters counters;

}  // namespace

CholFactor::CholFactor(Eigen::MatrixXd lower, double jitter)
    : lower_(std::move(lower)), jitter_(jitter) {
  log_det_ = 2.0 * lower_.diagonal().array().log().sum();
}

Eigen::VectorXd CholFactor::solve_lower(const Eigen::VectorXd& b) const {
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::MatrixXd CholFactor::solve_lower(const Eigen::MatrixXd& b) const {
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::VectorXd CholFactor::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd u = solve_lower(b);
  lower_.triangularView<Eigen::Lower>().transpose().solveInPlace(u);
  return u;
}

CholFactor cholesky(const Eigen::MatrixXd& C, const JitterPolicy& policy) {
  if (C.rows() != C.cols()) {
    throw std::invalid_argument("Cholesky input must be square");
  }
  ++counters.factorizations;
  counters.largest_dimension = std::max(counters.largest_dimension, C.rows());

  const double mean_diag = C.rows() > 0 ? C.diagonal().mean() : 0.0;
  double jitter = 0.0;
  const int attempts = policy.max_attempts + (policy.try_without_jitter ? 1 : 0);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const int step = policy.try_without_jitter ? attempt - 1 : attempt;
    jitter = step < 0 ? 0.0
                      : policy.relative_start * std::abs(mean_diag) *
                            std::pow(policy.growth, step);
    Eigen::MatrixXd A = C;
    A.diagonal().array() += jitter;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(A);
    if (llt.info() == Eigen::Success) {
      A.triangularView<Eigen::StrictlyUpper>().setZero();
      return CholFactor(std::move(A), jitter);
    }
  }
  std::ostringstream msg;
  msg << "matrix of size " << C.rows()
      << " is not positive definite; final jitter tried " << jitter;
  throw NotPositiveDefinite(msg.str(), jitter);
}

LinalgCounters linalg_counters() { return counters; }
void reset_linalg_counters() { counters = {}; }

LogDensity::LogDensity(Evaluator evaluator, DensityKind kind, std::string cost_class,
                       double cost_flops)
    : evaluator_(std::move(evaluator)),
      kind_(kind),
      cost_class_(std::move(cost_class)),
      cost_flops_(cost_flops) {
  if (!evaluator_) throw std::invalid_argument("LogDensity needs an evaluator");
  if (!(cost_flops_ >= 0.0)) throw std::invalid_argument("cost estimate must be nonnegative");
}

void GpProblem::validate() const {
  data.validate();
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("constant c must be nonnegative");
  if (prior.mean.size() < 3) {
    throw std::invalid_argument("prior must cover at least 3 hyperparameters");
  }
  prior.validate(prior.mean.size());
  const Eigen::Index n_ls = prior.mean.size() - 2;
  if (n_ls != 1 && n_ls != data.p()) {
    throw std::invalid_argument("prior dimension does not fit the kernel");
  }
}

double gaussian_log_likelihood(const Hyperparams& theta, const Dataset& data,
                               const JitterPolicy& policy) {
  const CholFactor chol = cholesky(build_cov_matrix(data, theta, true), policy);
  const Eigen::VectorXd u = chol.solve_lower(data.y);
  return -0.5 * u.squaredNorm() - 0.5 * chol.log_det() -
         static_cast<double>(data.n()) * kHalfLog2Pi;
}

double exact_log_posterior(const Hyperparams& theta, const Dataset& data,
                           const PriorSpec& prior) {
  return gaussian_log_likelihood(theta, data) + log_prior(theta, prior);
}

double exact_cost_flops(Eigen::Index n, Eigen::Index p) {
  const double nn = static_cast<double>(n);
  return static_cast<double>(p) * nn * nn / 2.0 + nn * nn * nn / 3.0;
}

LogDensity make_exact_density(const GpProblem& problem) {
  problem.validate();
  return LogDensity(
      [problem](const Eigen::VectorXd& v) {
        return exact_log_posterior(problem.hyperparams(v), problem.data,
                                   problem.prior);
      },
      DensityKind::Exact, "exact O(p n^2 + n^3)",
      exact_cost_flops(problem.data.n(), problem.data.p()));
}

Predictive predictive_fixed_theta(const Hyperparams& theta, const Dataset& data,
                                  const Eigen::VectorXd& xstar) {
  if (xstar.size() != data.p()) {
    throw std::invalid_argument("test covariate has wrong dimension");
  }
  const CholFactor chol = cholesky(build_cov_matrix(data, theta, true));
  const Eigen::VectorXd k =
      build_cross_cov(data.X, xstar.transpose(), theta).col(0);
  const Eigen::VectorXd a = chol.solve_lower(k);
  const Eigen::VectorXd u = chol.solve_lower(data.y);
  const double v = theta.c * theta.c + std::exp(2.0 * theta.log_eta) +
                   std::exp(2.0 * theta.log_sigma);
  return {a.dot(u), v - a.squaredNorm()};
}

Predictive mc_predictive(std::span<const Hyperparams> samples, const Dataset& data,
                         const Eigen::VectorXd& xstar) {
  if (samples.empty()) {
    throw std::invalid_argument("mc_predictive needs at least one sample");
  }
  const double count = static_cast<double>(samples.size());
  double mean_of_means = 0.0;
  double mean_of_vars = 0.0;
  std::vector<double> means;
  means.reserve(samples.size());
  for (const auto& theta : samples) {
    const Predictive p = predictive_fixed_theta(theta, data, xstar);
    means.push_back(p.mean);
    mean_of_means += p.mean / count;
    mean_of_vars += p.var / count;
  }
  double between = 0.0;
  for (double m : means) between += (m - mean_of_means) * (m - mean_of_means);
  return {mean_of_means, mean_of_vars + between / count};
}

}  // namespace gpmc
