#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gpmc {

/// Sample autocorrelations at lags 1..max_lag, normalized by the lag-0
/// autocovariance with divisor L at every lag. Throws std::invalid_argument
/// unless L > max_lag >= 1, and std::domain_error for a constant series.
std::vector<double> acf(std::span<const double> series, int max_lag);

struct ActEstimate {
  double tau = 1.0;
  int cutoff = 0;  // number of autocorrelations summed
  std::vector<double> rho;  // every lag computed, starting at lag 1
};

/// tau = 1 + 2 * sum_{i<=k} rho_i, with k the first lag after which two
/// consecutive autocorrelations lie inside +-1.96/sqrt(L); k <= L/3.
ActEstimate act_estimate_detail(std::span<const double> series);
double act_estimate(std::span<const double> series);

/// Per-iteration records of one chain.
struct ChainTrace {
  std::string method;    // standard | mapchain | tempered
  std::string label;     // surrogate description, empty for standard
  std::string dataset_id;
  std::vector<std::string> param_names;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::vector<Eigen::VectorXd> theta;
  std::vector<double> log_lik;
  std::vector<double> cpu_seconds;
  std::vector<std::uint64_t> exact_evals;
  std::vector<std::uint64_t> surrogate_evals;

  std::size_t size() const { return log_lik.size(); }
  void push(Eigen::VectorXd th, double ll, double seconds, std::uint64_t exact,
            std::uint64_t surrogate);
  /// Uniform record length, matching parameter dimensions, nonnegative times.
  void validate() const;
  std::vector<double> parameter_series(std::size_t k) const;

  bool operator==(const ChainTrace& other) const;
};

struct EfficiencyRow {
  std::string method;
  std::string label;
  double tau = 0.0;
  double time_per_iter = 0.0;
  double product = 0.0;
  std::optional<double> ratio;
  std::vector<double> param_tau;  // supplementary, per hyperparameter
};

struct EfficiencyReport {
  std::vector<EfficiencyRow> rows;
  std::vector<std::string> param_names;
  bool has_baseline = false;
  std::vector<std::string> notes;

  std::string to_table() const;
  std::string to_csv() const;
};

/// Fills product and ratio from tau and time. The first row whose method is
/// "standard" is the baseline; without one, ratios stay empty and the report
/// is flagged.
EfficiencyReport make_report(std::vector<EfficiencyRow> rows);

/// Drops the first burn_in_fraction of each trace, estimates tau on the
/// log-likelihood series and multiplies by mean CPU time per iteration.
/// Traces on a dataset other than the baseline's receive no ratio.
EfficiencyReport efficiency_report(std::span<const ChainTrace> traces,
                                   double burn_in_fraction = 1.0 / 3.0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Mean and its standard error sqrt(tau * var / L).
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double tau = 1.0;
};
MeanEstimate mcmc_mean(std::span<const double> series);

}  // namespace gpmc
