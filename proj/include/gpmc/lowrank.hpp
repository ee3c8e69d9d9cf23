#pragma once

#include "gpmc/exact_posterior.hpp"

#include <Eigen/Dense>

#include <optional>

namespace gpmc {

/// The matrix B S B^T + d I with B n x m, S m x m symmetric positive
/// definite (diagonal or dense) and scalar d > 0.
class LowRankPlusDiag {
 public:
  static LowRankPlusDiag diagonal_core(Eigen::MatrixXd B, Eigen::VectorXd s, double d,
                                       bool orthonormal_columns = false);
  static LowRankPlusDiag dense_core(Eigen::MatrixXd B, Eigen::MatrixXd S, double d);
  /// Heteroscedastic noise is not supported: throws unless all entries of
  /// `noise_diagonal` are equal.
  static LowRankPlusDiag diagonal_core(Eigen::MatrixXd B, Eigen::VectorXd s,
                                       const Eigen::VectorXd& noise_diagonal);

  const Eigen::MatrixXd& factor() const { return B_; }
  bool has_diagonal_core() const { return !S_dense_.has_value(); }
  const Eigen::VectorXd& core_diagonal() const { return s_; }
  Eigen::MatrixXd core() const;
  double noise() const { return d_; }
  bool orthonormal_columns() const { return orthonormal_; }
  Eigen::Index rows() const { return B_.rows(); }
  Eigen::Index rank() const { return B_.cols(); }

  /// Dense n x n form; O(n^2 m), meant for checks and small problems.
  Eigen::MatrixXd dense() const;

 private:
  LowRankPlusDiag(Eigen::MatrixXd B, Eigen::VectorXd s,
                  std::optional<Eigen::MatrixXd> S, double d, bool orthonormal);

  Eigen::MatrixXd B_;
  Eigen::VectorXd s_;
  std::optional<Eigen::MatrixXd> S_dense_;
  double d_;
  bool orthonormal_;
};

enum class WoodburyPath {
  Auto,                 // closed form when B is orthonormal and S diagonal
  General,              // inversion lemma with chol(S^-1 + B^T B / d)
  OrthonormalDiagonal,  // d^-1 I - B diag(s / (d (s + d))) B^T
};

struct QuadForm {
  double value = 0.0;
  /// Factor of S^-1 + B^T B / d; empty on the closed-form path.
  std::optional<CholFactor> inner;
};

QuadForm lrpd_solve_quadform(const LowRankPlusDiag& lr, const Eigen::VectorXd& y,
                             WoodburyPath path = WoodburyPath::Auto);

double lrpd_logdet(const LowRankPlusDiag& lr, WoodburyPath path = WoodburyPath::Auto);

/// log N(y | 0, B S B^T + d I).
double lrpd_loglik(const LowRankPlusDiag& lr, const Eigen::VectorXd& y,
                   WoodburyPath path = WoodburyPath::Auto);

}  // namespace gpmc
