#pragma once

#include "gpmc/model_core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace gpmc {

/// Diagonal inflation used when a Cholesky factorization fails.
///
/// The first attempt adds nothing (when `try_without_jitter`). Subsequent
/// attempts add `relative_start * mean(diag C)`, multiplied by `growth` each
/// time, for at most `max_attempts` jittered attempts.
struct JitterPolicy {
  bool try_without_jitter = true;
  double relative_start = 1e-8;
  double growth = 10.0;
  int max_attempts = 4;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(const std::string& what, double last_jitter)
      : std::runtime_error(what), last_jitter_(last_jitter) {}
  double last_jitter() const { return last_jitter_; }

 private:
  double last_jitter_;
};

/// Cholesky factor of C + jitter*I. `lower()` is L = R^T with R^T R = C.
class CholFactor {
 public:
  CholFactor() = default;
  CholFactor(Eigen::MatrixXd lower, double jitter);

  const Eigen::MatrixXd& lower() const { return lower_; }
  Eigen::MatrixXd upper() const { return lower_.transpose(); }
  double jitter() const { return jitter_; }
  double log_det() const { return log_det_; }
  Eigen::Index size() const { return lower_.rows(); }

  /// Forward substitution: solves R^T u = b.
  Eigen::VectorXd solve_lower(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& b) const;
  /// C^{-1} b through two triangular solves.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
  double log_det_ = 0.0;
};

CholFactor cholesky(const Eigen::MatrixXd& C, const JitterPolicy& policy = {});

/// Factorization activity on the calling thread; used to confirm which
/// matrix sizes a code path actually factorizes.
struct LinalgCounters {
  std::uint64_t factorizations = 0;
  Eigen::Index largest_dimension = 0;
};
LinalgCounters linalg_counters();
void reset_linalg_counters();

enum class DensityKind { Exact, Surrogate };

/// An unnormalized log density over the flat hyperparameter vector, with an
/// evaluation counter. One chain owns one instance; the counter is not
/// synchronized.
class LogDensity {
 public:
  using Evaluator = std::function<double(const Eigen::VectorXd&)>;

  /// `cost_flops` is a rough operation count per evaluation, used only to
  /// compare densities with each other.
  LogDensity(Evaluator evaluator, DensityKind kind, std::string cost_class = {},
             double cost_flops = 0.0);

  double operator()(const Eigen::VectorXd& theta) {
    ++count_;
    return evaluator_(theta);
  }

  DensityKind kind() const { return kind_; }
  const std::string& cost_class() const { return cost_class_; }
  double cost_flops() const { return cost_flops_; }
  std::uint64_t eval_count() const { return count_; }
  void reset_count() { count_ = 0; }

 private:
  Evaluator evaluator_;
  DensityKind kind_;
  std::string cost_class_;
  double cost_flops_ = 0.0;
  std::uint64_t count_ = 0;
};

/// Everything needed to evaluate a hyperparameter posterior.
struct GpProblem {
  Dataset data;
  PriorSpec prior;
  double c = 10.0;

  void validate() const;
  Hyperparams hyperparams(const Eigen::VectorXd& v) const {
    return Hyperparams::from_vector(v, c);
  }
};

/// log N(y | 0, K + sigma^2 I) through the Cholesky factor.
double gaussian_log_likelihood(const Hyperparams& theta, const Dataset& data,
                               const JitterPolicy& policy = {});

double exact_log_posterior(const Hyperparams& theta, const Dataset& data,
                           const PriorSpec& prior);

/// Kernel build plus Cholesky: p n^2 / 2 + n^3 / 3.
double exact_cost_flops(Eigen::Index n, Eigen::Index p);

LogDensity make_exact_density(const GpProblem& problem);

struct Predictive {
  double mean = 0.0;
  double var = 0.0;
};

Predictive predictive_fixed_theta(const Hyperparams& theta, const Dataset& data,
                                  const Eigen::VectorXd& xstar);

/// Averages per-sample predictive laws (law of total variance).
Predictive mc_predictive(std::span<const Hyperparams> samples, const Dataset& data,
                         const Eigen::VectorXd& xstar);

}  // namespace gpmc
