#pragma once

#include "gpmc/exact_posterior.hpp"
#include "gpmc/lowrank.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gpmc {

enum class SurrogateMethod { Sod, EigenExact, Nystrom };

std::string to_string(SurrogateMethod method);
SurrogateMethod parse_surrogate_method(std::string_view name);

/// Which fast approximation to build, its size m (subset size, rank or
/// column count) and the seed fixing the chosen cases.
struct SurrogateSpec {
  SurrogateMethod method = SurrogateMethod::Sod;
  Eigen::Index m = 1;
  std::uint64_t seed = 1;

  void validate(Eigen::Index n) const;
  std::string label() const;  // e.g. "sod:40"
};

/// m distinct case indices drawn uniformly without replacement, ascending.
std::vector<Eigen::Index> select_subset(Eigen::Index n, Eigen::Index m,
                                        std::uint64_t seed);

/// Subset of data: the exact posterior of a fixed, seed-chosen subset.
LogDensity build_sod(const GpProblem& problem, const SurrogateSpec& spec);

/// Top-m eigenpairs of the noise-free K, plus sigma^2 I. A reference
/// method: its O(n^3) eigensolve is usually slower than the exact density.
LogDensity build_eigen_exact(const GpProblem& problem, const SurrogateSpec& spec);

/// Nystrom-Cholesky: K_hat = K(n,m) K(m,m)^-1 K(m,n) written as B B^T with
/// B = K(n,m) R^-1. The columns are fixed at build time; B is rebuilt for
/// every theta.
LogDensity build_nystrom(const GpProblem& problem, const SurrogateSpec& spec);

LogDensity build_surrogate(const GpProblem& problem, const SurrogateSpec& spec);

/// Low-rank-plus-diagonal form of the Nystrom-Cholesky covariance.
LowRankPlusDiag nystrom_factor(const Dataset& data, const Hyperparams& theta,
                               std::span<const Eigen::Index> columns,
                               const JitterPolicy& policy = {});

/// Low-rank-plus-diagonal form of the Eigen-exact covariance.
LowRankPlusDiag eigen_exact_factor(const Dataset& data, const Hyperparams& theta,
                                   Eigen::Index m);

/// Nystrom estimates of the leading eigenpairs of K, in decreasing order of
/// the subset eigenvalues. Vectors whose subset eigenvalue is not positive
/// are left as zero columns and flagged undefined.
struct NystromSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<bool> defined;
};

NystromSpectrum nystrom_spectral(const Dataset& data, const Hyperparams& theta,
                                 std::span<const Eigen::Index> columns);
NystromSpectrum nystrom_spectral(const Dataset& data, const Hyperparams& theta,
                                 Eigen::Index m, std::uint64_t seed);

}  // namespace gpmc
