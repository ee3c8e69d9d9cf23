#include "gpmc/model_core.hpp"

#include <cmath>
#include <stdexcept>

namespace gpmc {

namespace {

thread_local std::uint64_t kernel_counter = 0;

// Covariates scaled by their length scales, one column per case, so that the
// squared distance in the kernel is a plain Euclidean distance.
Eigen::MatrixXd scaled_columns(const Eigen::MatrixXd& X,
                               const Hyperparams& theta) {
  Eigen::MatrixXd Z = X.transpose();
  if (theta.mode() == KernelMode::Isotropic) {
    Z /= std::exp(theta.log_ls[0]);
  } else {
    Z.array().colwise() /= theta.log_ls.array().exp();
  }
  return Z;
}

void check_lengths(const Hyperparams& theta, Eigen::Index p) {
  if (theta.log_ls.size() != 1 && theta.log_ls.size() != p) {
    throw std::invalid_argument(
        "length-scale count " + std::to_string(theta.log_ls.size()) +
        " does not match covariate dimension " + std::to_string(p));
  }
}

}  // namespace

Eigen::VectorXd Hyperparams::to_vector() const {
  Eigen::VectorXd v(dim());
  v[0] = log_eta;
  v[1] = log_sigma;
  v.tail(log_ls.size()) = log_ls;
  return v;
}

Hyperparams Hyperparams::from_vector(const Eigen::VectorXd& v, double c) {
  if (v.size() < 3) {
    throw std::invalid_argument("hyperparameter vector needs at least 3 entries");
  }
  Hyperparams h;
  h.log_eta = v[0];
  h.log_sigma = v[1];
  h.log_ls = v.tail(v.size() - 2);
  h.c = c;
  return h;
}

void Hyperparams::validate(Eigen::Index p) const {
  if (!std::isfinite(log_eta) || !std::isfinite(log_sigma) ||
      !log_ls.allFinite()) {
    throw std::invalid_argument("hyperparameters must be finite");
  }
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("constant c must be nonnegative and finite");
  }
  if (log_ls.size() == 0) {
    throw std::invalid_argument("at least one length scale is required");
  }
  check_lengths(*this, p);
}

std::vector<std::string> Hyperparams::names() const {
  std::vector<std::string> out{"log_eta", "log_sigma"};
  if (log_ls.size() == 1) {
    out.emplace_back("log_rho");
  } else {
    for (Eigen::Index k = 0; k < log_ls.size(); ++k) {
      out.push_back("log_rho_" + std::to_string(k + 1));
    }
  }
  return out;
}

void Dataset::validate() const {
  if (X.rows() != y.size()) {
    throw std::invalid_argument("X has " + std::to_string(X.rows()) +
                                " rows but y has " + std::to_string(y.size()) +
                                " entries");
  }
  if (X.rows() < 1 || X.cols() < 1) {
    throw std::invalid_argument("dataset must have at least one case and one covariate");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("dataset contains non-finite values");
  }
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), p());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (r < 0 || r >= n()) throw std::out_of_range("subset row out of range");
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
    out.y[static_cast<Eigen::Index>(i)] = y[r];
  }
  return out;
}

PriorSpec PriorSpec::independent(Eigen::Index dim, double mean, double sd) {
  return {Eigen::VectorXd::Constant(dim, mean), Eigen::VectorXd::Constant(dim, sd)};
}

void PriorSpec::validate(Eigen::Index dim) const {
  if (mean.size() != dim || sd.size() != dim) {
    throw std::invalid_argument("prior dimension " + std::to_string(mean.size()) +
                                " does not match hyperparameter dimension " +
                                std::to_string(dim));
  }
  if (!((sd.array() > 0.0).all()) || !sd.allFinite() || !mean.allFinite()) {
    throw std::invalid_argument("prior SDs must be positive and finite");
  }
}

double kernel_eval(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const Hyperparams& theta, KernelMode mode) {
  if (xi.size() != xj.size()) {
    throw std::invalid_argument("covariate vectors differ in length");
  }
  if (mode == KernelMode::Isotropic && theta.log_ls.size() != 1) {
    throw std::invalid_argument("isotropic kernel needs exactly one length scale");
  }
  if (mode == KernelMode::Ard && theta.log_ls.size() != xi.size()) {
    throw std::invalid_argument("ARD kernel needs one length scale per covariate");
  }
  ++kernel_counter;
  double dist2 = 0.0;
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    const double rho = std::exp(mode == KernelMode::Isotropic ? theta.log_ls[0]
                                                              : theta.log_ls[k]);
    const double diff = (xi[k] - xj[k]) / rho;
    dist2 += diff * diff;
  }
  return theta.c * theta.c + std::exp(2.0 * theta.log_eta - dist2);
}

double kernel_eval(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                   const Hyperparams& theta) {
  return kernel_eval(xi, xj, theta, theta.mode());
}

Eigen::MatrixXd build_cov_matrix(const Dataset& data, const Hyperparams& theta,
                                 bool include_noise) {
  check_lengths(theta, data.p());
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const Eigen::MatrixXd Z = scaled_columns(data.X, theta);
  const double c2 = theta.c * theta.c;
  const double log_eta2 = 2.0 * theta.log_eta;

  Eigen::MatrixXd C(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double* zj = Z.col(j).data();
    C(j, j) = c2 + std::exp(log_eta2);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double* zi = Z.col(i).data();
      double dist2 = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double diff = zi[k] - zj[k];
        dist2 += diff * diff;
      }
      C(i, j) = c2 + std::exp(log_eta2 - dist2);
      C(j, i) = C(i, j);
    }
  }
  kernel_counter += static_cast<std::uint64_t>(n * (n + 1) / 2);
  if (include_noise) {
    C.diagonal().array() += std::exp(2.0 * theta.log_sigma);
  }
  return C;
}

Eigen::MatrixXd build_cross_cov(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B,
                                const Hyperparams& theta) {
  if (A.cols() != B.cols()) {
    throw std::invalid_argument("covariate matrices differ in column count");
  }
  check_lengths(theta, A.cols());
  const Eigen::MatrixXd Za = scaled_columns(A, theta);
  const Eigen::MatrixXd Zb = scaled_columns(B, theta);
  const double c2 = theta.c * theta.c;
  const double log_eta2 = 2.0 * theta.log_eta;
  const Eigen::Index p = A.cols();

  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    const double* zj = Zb.col(j).data();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double* zi = Za.col(i).data();
      double dist2 = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double diff = zi[k] - zj[k];
        dist2 += diff * diff;
      }
      K(i, j) = c2 + std::exp(log_eta2 - dist2);
    }
  }
  kernel_counter += static_cast<std::uint64_t>(A.rows() * B.rows());
  return K;
}

double log_prior(const Eigen::VectorXd& theta, const PriorSpec& prior) {
  prior.validate(theta.size());
  constexpr double half_log_2pi = 0.91893853320467274178;
  double total = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double z = (theta[k] - prior.mean[k]) / prior.sd[k];
    total += -0.5 * z * z - std::log(prior.sd[k]) - half_log_2pi;
  }
  return total;
}

double log_prior(const Hyperparams& theta, const PriorSpec& prior) {
  return log_prior(theta.to_vector(), prior);
}

std::uint64_t kernel_evaluations() { return kernel_counter; }
void reset_kernel_evaluations() { kernel_counter = 0; }

}  // namespace gpmc
