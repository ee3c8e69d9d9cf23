#include "gpmc/lowrank.hpp"

#include <cmath>
#include <stdexcept>

namespace gpmc {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

struct InnerParts {
  CholFactor inner;    // chol(S^-1 + B^T B / d)
  double log_det_core;  // log det S
};

InnerParts factor_inner(const LowRankPlusDiag& lr) {
  const Eigen::Index m = lr.rank();
  Eigen::MatrixXd M(m, m);
  double log_det_core = 0.0;
  if (lr.has_diagonal_core()) {
    const Eigen::VectorXd& s = lr.core_diagonal();
    if (!((s.array() > 0.0).all())) {
      throw std::domain_error("diagonal core must be positive on the general path");
    }
    M.setZero();
    M.diagonal() = s.cwiseInverse();
    log_det_core = s.array().log().sum();
  } else {
    const CholFactor core = cholesky(lr.core());
    M = core.lower().transpose().triangularView<Eigen::Upper>().solve(
        core.solve_lower(Eigen::MatrixXd(Eigen::MatrixXd::Identity(m, m))));
    M = 0.5 * (M + M.transpose()).eval();
    log_det_core = core.log_det();
  }
  M.selfadjointView<Eigen::Lower>().rankUpdate(lr.factor().transpose(),
                                               1.0 / lr.noise());
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose().eval();
  return {cholesky(M), log_det_core};
}

bool use_closed_form(const LowRankPlusDiag& lr, WoodburyPath path) {
  switch (path) {
    case WoodburyPath::General:
      return false;
    case WoodburyPath::OrthonormalDiagonal:
      if (!lr.has_diagonal_core()) {
        throw std::invalid_argument("closed-form path needs a diagonal core");
      }
      return true;
    case WoodburyPath::Auto:
      break;
  }
  return lr.has_diagonal_core() && lr.orthonormal_columns();
}

double closed_form_quad(const LowRankPlusDiag& lr, const Eigen::VectorXd& y) {
  const double d = lr.noise();
  const Eigen::ArrayXd t = (lr.factor().transpose() * y).array();
  const Eigen::ArrayXd s = lr.core_diagonal().array();
  return y.squaredNorm() / d - (s / (d * (s + d)) * t.square()).sum();
}

double closed_form_logdet(const LowRankPlusDiag& lr) {
  const double d = lr.noise();
  return static_cast<double>(lr.rows()) * std::log(d) +
         (lr.core_diagonal().array() / d).log1p().sum();
}

double general_quad(const LowRankPlusDiag& lr, const Eigen::VectorXd& y,
                    const CholFactor& inner) {
  const double d = lr.noise();
  const Eigen::VectorXd b = lr.factor().transpose() * y / d;
  return y.squaredNorm() / d - inner.solve_lower(b).squaredNorm();
}

double general_logdet(const LowRankPlusDiag& lr, const InnerParts& parts) {
  return parts.inner.log_det() +
         static_cast<double>(lr.rows()) * std::log(lr.noise()) + parts.log_det_core;
}

}  // namespace

LowRankPlusDiag::LowRankPlusDiag(Eigen::MatrixXd B, Eigen::VectorXd s,
                                 std::optional<Eigen::MatrixXd> S, double d,
                                 bool orthonormal)
    : B_(std::move(B)), s_(std::move(s)), S_dense_(std::move(S)), d_(d),
      orthonormal_(orthonormal) {
  if (!(d_ > 0.0) || !std::isfinite(d_)) {
    throw std::invalid_argument("diagonal term d must be positive");
  }
  if (B_.cols() > B_.rows()) {
    throw std::invalid_argument("rank m must not exceed n");
  }
  if (S_dense_) {
    if (S_dense_->rows() != B_.cols() || S_dense_->cols() != B_.cols()) {
      throw std::invalid_argument("core matrix must be m x m");
    }
  } else if (s_.size() != B_.cols()) {
    throw std::invalid_argument("core diagonal must have m entries");
  }
}

LowRankPlusDiag LowRankPlusDiag::diagonal_core(Eigen::MatrixXd B, Eigen::VectorXd s,
                                               double d, bool orthonormal_columns) {
  return LowRankPlusDiag(std::move(B), std::move(s), std::nullopt, d,
                         orthonormal_columns);
}

LowRankPlusDiag LowRankPlusDiag::dense_core(Eigen::MatrixXd B, Eigen::MatrixXd S,
                                            double d) {
  return LowRankPlusDiag(std::move(B), Eigen::VectorXd(), std::move(S), d, false);
}

LowRankPlusDiag LowRankPlusDiag::diagonal_core(Eigen::MatrixXd B, Eigen::VectorXd s,
                                               const Eigen::VectorXd& noise_diagonal) {
  if (noise_diagonal.size() != B.rows()) {
    throw std::invalid_argument("noise diagonal must have n entries");
  }
  if (noise_diagonal.size() > 0 &&
      (noise_diagonal.array() != noise_diagonal[0]).any()) {
    throw std::invalid_argument("only a scalar noise diagonal d*I is supported");
  }
  const double d = noise_diagonal.size() > 0 ? noise_diagonal[0] : 1.0;
  return diagonal_core(std::move(B), std::move(s), d, false);
}

Eigen::MatrixXd LowRankPlusDiag::core() const {
  if (S_dense_) return *S_dense_;
  return s_.asDiagonal();
}

Eigen::MatrixXd LowRankPlusDiag::dense() const {
  Eigen::MatrixXd C = B_ * core() * B_.transpose();
  C.diagonal().array() += d_;
  return C;
}

QuadForm lrpd_solve_quadform(const LowRankPlusDiag& lr, const Eigen::VectorXd& y,
                             WoodburyPath path) {
  if (y.size() != lr.rows()) {
    throw std::invalid_argument("vector length does not match the matrix");
  }
  if (use_closed_form(lr, path)) {
    return {closed_form_quad(lr, y), std::nullopt};
  }
  InnerParts parts = factor_inner(lr);
  const double q = general_quad(lr, y, parts.inner);
  return {q, std::move(parts.inner)};
}

double lrpd_logdet(const LowRankPlusDiag& lr, WoodburyPath path) {
  if (use_closed_form(lr, path)) return closed_form_logdet(lr);
  return general_logdet(lr, factor_inner(lr));
}

double lrpd_loglik(const LowRankPlusDiag& lr, const Eigen::VectorXd& y,
                   WoodburyPath path) {
  if (y.size() != lr.rows()) {
    throw std::invalid_argument("vector length does not match the matrix");
  }
  double quad = 0.0;
  double logdet = 0.0;
  if (use_closed_form(lr, path)) {
    quad = closed_form_quad(lr, y);
    logdet = closed_form_logdet(lr);
  } else {
    const InnerParts parts = factor_inner(lr);
    quad = general_quad(lr, y, parts.inner);
    logdet = general_logdet(lr, parts);
  }
  return -0.5 * quad - 0.5 * logdet - static_cast<double>(lr.rows()) * kHalfLog2Pi;
}

}  // namespace gpmc
