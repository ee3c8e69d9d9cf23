#include "gpmc/approximations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gpmc {

std::string to_string(SurrogateMethod method) {
  switch (method) {
    case SurrogateMethod::Sod: return "sod";
    case SurrogateMethod::EigenExact: return "eigen";
    case SurrogateMethod::Nystrom: return "nystrom";
  }
  return "unknown";
}

SurrogateMethod parse_surrogate_method(std::string_view name) {
  if (name == "sod") return SurrogateMethod::Sod;
  if (name == "eigen") return SurrogateMethod::EigenExact;
  if (name == "nystrom") return SurrogateMethod::Nystrom;
  throw std::invalid_argument("unknown surrogate method '" + std::string(name) + "'");
}

void SurrogateSpec::validate(Eigen::Index n) const {
  if (m < 1 || m > n) {
    throw std::invalid_argument("surrogate size m=" + std::to_string(m) +
                                " must lie in [1, " + std::to_string(n) + "]");
  }
}

std::string SurrogateSpec::label() const {
  return to_string(method) + ":" + std::to_string(m);
}

std::vector<Eigen::Index> select_subset(Eigen::Index n, Eigen::Index m,
                                        std::uint64_t seed) {
  if (m < 1 || m > n) throw std::invalid_argument("subset size out of range");
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::vector<Eigen::Index> chosen;
  chosen.reserve(static_cast<std::size_t>(m));
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), m, rng);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

LogDensity build_sod(const GpProblem& problem, const SurrogateSpec& spec) {
  problem.validate();
  if (spec.method != SurrogateMethod::Sod) {
    throw std::invalid_argument("build_sod needs method 'sod'");
  }
  spec.validate(problem.data.n());
  const auto rows = select_subset(problem.data.n(), spec.m, spec.seed);
  GpProblem sub{problem.data.subset(rows), problem.prior, problem.c};
  return LogDensity(
      [sub = std::move(sub)](const Eigen::VectorXd& v) {
        return exact_log_posterior(sub.hyperparams(v), sub.data, sub.prior);
      },
      DensityKind::Surrogate, "sod O(p m^2 + m^3)", exact_cost_flops(spec.m, problem.data.p()));
}

LowRankPlusDiag eigen_exact_factor(const Dataset& data, const Hyperparams& theta,
                                   Eigen::Index m) {
  if (m < 1 || m > data.n()) throw std::invalid_argument("rank out of range");
  const Eigen::MatrixXd K = build_cov_matrix(data, theta, false);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition of the kernel matrix failed");
  }
  // Eigen returns ascending eigenvalues; keep the m largest, largest first.
  Eigen::MatrixXd B = eig.eigenvectors().rightCols(m).rowwise().reverse();
  Eigen::VectorXd s = eig.eigenvalues().tail(m).reverse();
  return LowRankPlusDiag::diagonal_core(std::move(B), std::move(s),
                                        std::exp(2.0 * theta.log_sigma), true);
}

LogDensity build_eigen_exact(const GpProblem& problem, const SurrogateSpec& spec) {
  problem.validate();
  if (spec.method != SurrogateMethod::EigenExact) {
    throw std::invalid_argument("build_eigen_exact needs method 'eigen'");
  }
  spec.validate(problem.data.n());
  const Eigen::Index m = spec.m;
  return LogDensity(
      [problem, m](const Eigen::VectorXd& v) {
        const Hyperparams theta = problem.hyperparams(v);
        return lrpd_loglik(eigen_exact_factor(problem.data, theta, m), problem.data.y) +
               log_prior(theta, problem.prior);
      },
      DensityKind::Surrogate, "eigen-exact O(n^3) eigensolve",
      9.0 * std::pow(static_cast<double>(problem.data.n()), 3) +
          exact_cost_flops(problem.data.n(), problem.data.p()));
}

LowRankPlusDiag nystrom_factor(const Dataset& data, const Hyperparams& theta,
                               std::span<const Eigen::Index> columns,
                               const JitterPolicy& policy) {
  const Eigen::Index m = static_cast<Eigen::Index>(columns.size());
  if (m < 1 || m > data.n()) throw std::invalid_argument("column count out of range");
  const Dataset anchors = data.subset(columns);
  const Eigen::MatrixXd Knm = build_cross_cov(data.X, anchors.X, theta);
  Eigen::MatrixXd Kmm(m, m);
  for (Eigen::Index i = 0; i < m; ++i) Kmm.row(i) = Knm.row(columns[static_cast<std::size_t>(i)]);
  const CholFactor R = cholesky(Kmm, policy);
  Eigen::MatrixXd B = R.solve_lower(Eigen::MatrixXd(Knm.transpose())).transpose();
  return LowRankPlusDiag::diagonal_core(std::move(B), Eigen::VectorXd::Ones(m),
                                        std::exp(2.0 * theta.log_sigma), false);
}

LogDensity build_nystrom(const GpProblem& problem, const SurrogateSpec& spec) {
  problem.validate();
  if (spec.method != SurrogateMethod::Nystrom) {
    throw std::invalid_argument("build_nystrom needs method 'nystrom'");
  }
  spec.validate(problem.data.n());
  auto columns = select_subset(problem.data.n(), spec.m, spec.seed);
  return LogDensity(
      [problem, columns = std::move(columns)](const Eigen::VectorXd& v) {
        const Hyperparams theta = problem.hyperparams(v);
        return lrpd_loglik(nystrom_factor(problem.data, theta, columns), problem.data.y) +
               log_prior(theta, problem.prior);
      },
      DensityKind::Surrogate, "nystrom O(p m n + n m^2)",
      static_cast<double>(problem.data.n() * spec.m) *
          static_cast<double>(problem.data.p() + 2 * spec.m));
}

LogDensity build_surrogate(const GpProblem& problem, const SurrogateSpec& spec) {
  switch (spec.method) {
    case SurrogateMethod::Sod: return build_sod(problem, spec);
    case SurrogateMethod::EigenExact: return build_eigen_exact(problem, spec);
    case SurrogateMethod::Nystrom: return build_nystrom(problem, spec);
  }
  throw std::invalid_argument("unknown surrogate method");
}

NystromSpectrum nystrom_spectral(const Dataset& data, const Hyperparams& theta,
                                 std::span<const Eigen::Index> columns) {
  const Eigen::Index m = static_cast<Eigen::Index>(columns.size());
  if (m < 1 || m > data.n()) throw std::invalid_argument("column count out of range");
  const Dataset anchors = data.subset(columns);
  const Eigen::MatrixXd Knm = build_cross_cov(data.X, anchors.X, theta);
  Eigen::MatrixXd Kmm(m, m);
  for (Eigen::Index i = 0; i < m; ++i) Kmm.row(i) = Knm.row(columns[static_cast<std::size_t>(i)]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Kmm);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition of the subset kernel failed");
  }
  const double n_over_m = static_cast<double>(data.n()) / static_cast<double>(m);
  const double tiny = 1e-14 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());

  NystromSpectrum out;
  out.values.resize(m);
  out.vectors = Eigen::MatrixXd::Zero(data.n(), m);
  out.defined.assign(static_cast<std::size_t>(m), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index src = m - 1 - i;
    const double lambda = eig.eigenvalues()[src];
    out.values[i] = n_over_m * lambda;
    if (lambda > tiny) {
      out.vectors.col(i) = std::sqrt(1.0 / n_over_m) / lambda * (Knm * eig.eigenvectors().col(src));
      out.defined[static_cast<std::size_t>(i)] = true;
    }
  }
  return out;
}

NystromSpectrum nystrom_spectral(const Dataset& data, const Hyperparams& theta,
                                 Eigen::Index m, std::uint64_t seed) {
  const auto columns = select_subset(data.n(), m, seed);
  return nystrom_spectral(data, theta, columns);
}

}  // namespace gpmc
