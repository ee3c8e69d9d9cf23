#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gpmc {

enum class KernelMode { Isotropic, Ard };

/// Covariance hyperparameters, stored on the log scale.
///
/// The sampler state is the flat vector `[log_eta, log_sigma, log_ls...]`
/// (see to_vector / from_vector). The constant `c` is a run-level setting
/// and never part of the sampled vector.
struct Hyperparams {
  double log_eta = 0.0;
  double log_sigma = 0.0;
  Eigen::VectorXd log_ls = Eigen::VectorXd::Zero(1);
  double c = 10.0;

  double eta() const { return std::exp(log_eta); }
  double sigma() const { return std::exp(log_sigma); }
  Eigen::VectorXd length_scales() const { return log_ls.array().exp(); }

  /// One length scale means isotropic; several means ARD.
  KernelMode mode() const {
    return log_ls.size() == 1 ? KernelMode::Isotropic : KernelMode::Ard;
  }

  Eigen::Index dim() const { return 2 + log_ls.size(); }

  Eigen::VectorXd to_vector() const;
  static Hyperparams from_vector(const Eigen::VectorXd& v, double c);

  /// Throws std::invalid_argument unless all entries are finite, c >= 0 and
  /// the length-scale count fits a covariate dimension of p.
  void validate(Eigen::Index p) const;

  /// Column names matching to_vector() order.
  std::vector<std::string> names() const;
};

struct Dataset {
  Eigen::MatrixXd X;  // n x p
  Eigen::VectorXd y;  // n

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  void validate() const;
  Dataset subset(std::span<const Eigen::Index> rows) const;
};

/// Independent Gaussians on each log-scale hyperparameter.
struct PriorSpec {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;

  static PriorSpec independent(Eigen::Index dim, double mean = 0.0,
                               double sd = 3.0);
  void validate(Eigen::Index dim) const;
};

double kernel_eval(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const Hyperparams& theta, KernelMode mode);
double kernel_eval(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const Hyperparams& theta);

/// K(x_i, x_j) + delta_ij sigma^2 (noise only when include_noise).
Eigen::MatrixXd build_cov_matrix(const Dataset& data, const Hyperparams& theta,
                                 bool include_noise);

/// Noise-free cross covariance between the rows of A and the rows of B.
Eigen::MatrixXd build_cross_cov(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Hyperparams& theta);

double log_prior(const Hyperparams& theta, const PriorSpec& prior);
double log_prior(const Eigen::VectorXd& theta, const PriorSpec& prior);

/// Kernel entries computed on the calling thread since the last reset.
std::uint64_t kernel_evaluations();
void reset_kernel_evaluations();

}  // namespace gpmc
