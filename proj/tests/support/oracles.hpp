#pragma once

#include "gpmc/model_core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace oracle {

// Kernel written out term by term from the covariance formula.
double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double eta,
              const Eigen::VectorXd& ls, double c);

Eigen::MatrixXd dense_covariance(const Eigen::MatrixXd& X, double eta, double sigma,
                                 const Eigen::VectorXd& ls, double c);

// log N(y | 0, C) through an LU inverse and LU determinant.
double dense_gaussian_loglik(const Eigen::MatrixXd& C, const Eigen::VectorXd& y);

double gp_log_likelihood(const gpmc::Hyperparams& theta, const gpmc::Dataset& data);

double normal_log_prior(const Eigen::VectorXd& v, double mean, double sd);

struct Random {
  std::mt19937_64 rng;
  explicit Random(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  Eigen::MatrixXd uniform_matrix(Eigen::Index r, Eigen::Index c, double lo = 0.0, double hi = 1.0);
  Eigen::VectorXd normal_vector(Eigen::Index n);
};

gpmc::Dataset random_dataset(Random& r, Eigen::Index n, Eigen::Index p);

}  // namespace oracle
