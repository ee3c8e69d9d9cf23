#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double eta,
              const Eigen::VectorXd& ls, double c) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double l = ls.size() == 1 ? ls[0] : ls[k];
    const double d = (a[k] - b[k]) / l;
    s += d * d;
  }
  return c * c + eta * eta * std::exp(-s);
}

Eigen::MatrixXd dense_covariance(const Eigen::MatrixXd& X, double eta, double sigma,
                                 const Eigen::VectorXd& ls, double c) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      C(i, j) = kernel(X.row(i).transpose(), X.row(j).transpose(), eta, ls, c);
    }
    C(i, i) += sigma * sigma;
  }
  return C;
}

double dense_gaussian_loglik(const Eigen::MatrixXd& C, const Eigen::VectorXd& y) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  const Eigen::MatrixXd inv = lu.inverse();
  double logdet = 0.0;
  const Eigen::MatrixXd U = lu.matrixLU().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < U.rows(); ++i) logdet += std::log(std::abs(U(i, i)));
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(inv * y) - 0.5 * logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

double gp_log_likelihood(const gpmc::Hyperparams& theta, const gpmc::Dataset& data) {
  const Eigen::VectorXd ls = theta.log_ls.array().exp();
  return dense_gaussian_loglik(
      dense_covariance(data.X, std::exp(theta.log_eta), std::exp(theta.log_sigma), ls, theta.c),
      data.y);
}

double normal_log_prior(const Eigen::VectorXd& v, double mean, double sd) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double z = (v[i] - mean) / sd;
    s += -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return s;
}

Eigen::MatrixXd Random::uniform_matrix(Eigen::Index r, Eigen::Index c, double lo, double hi) {
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = uniform(lo, hi);
  }
  return M;
}

Eigen::VectorXd Random::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

gpmc::Dataset random_dataset(Random& r, Eigen::Index n, Eigen::Index p) {
  gpmc::Dataset d;
  d.X = r.uniform_matrix(n, p);
  d.y = 3.0 * r.normal_vector(n);
  return d;
}

}  // namespace oracle
