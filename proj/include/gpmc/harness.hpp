#pragma once

#include "gpmc/approximations.hpp"
#include "gpmc/diagnostics.hpp"
#include "gpmc/mapchain.hpp"
#include "gpmc/model_core.hpp"
#include "gpmc/slice_sampler.hpp"
#include "gpmc/tempered.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gpmc {

enum class LengthScaleProfile { Short, Long };

std::string to_string(LengthScaleProfile profile);
LengthScaleProfile parse_profile(std::string_view name);
std::string to_string(KernelMode mode);
KernelMode parse_kernel_mode(std::string_view name);

/// A synthetic dataset: X uniform on [0,1]^p, y ~ N(0, K + sigma^2 I).
/// Short profile: l = 0.1 (isotropic) or l_k = 0.1 k (ARD, k = 1..p).
/// Long profile:  l = 2 or l_k = 2 k. When `path` is set the data are read
/// from that CSV instead, and the generating values only seed the chain.
struct DatasetSpec {
  Eigen::Index n = 300;
  Eigen::Index p = 1;
  KernelMode mode = KernelMode::Isotropic;
  LengthScaleProfile profile = LengthScaleProfile::Short;
  double eta = 5.0;
  double sigma = 0.1;
  double c = 10.0;
  std::uint64_t seed = 1;
  std::optional<std::string> path;

  void validate() const;
  Eigen::VectorXd length_scales() const;
  /// Requires sigma > 0, since the sampler works on log sigma.
  Hyperparams generating_hyperparams() const;
  /// Canonical description; equal ids mean equal data.
  std::string id() const;
  bool operator==(const DatasetSpec&) const = default;
};

Dataset gen_synthetic(const DatasetSpec& spec);
/// Draws y ~ N(0, K + sigma^2 I) at given covariates with the spec's kernel
/// values (spec.n is ignored). Semidefinite covariances are allowed.
Eigen::VectorXd sample_gp_outputs(const Eigen::MatrixXd& X, const DatasetSpec& spec,
                                  std::mt19937_64& rng);
Dataset materialize(const DatasetSpec& spec);

enum class MethodKind { Standard, Mapchain, Tempered };
std::string to_string(MethodKind kind);
MethodKind parse_method_kind(std::string_view name);
std::string to_string(SweepOrder order);
SweepOrder parse_sweep_order(std::string_view name);

struct LevelSpec {
  SurrogateSpec surrogate;
  int repeats = 1;
};

struct MethodSpec {
  MethodKind kind = MethodKind::Standard;
  SliceConfig slice;
  SweepOrder order = SweepOrder::Ascending;
  SurrogateSpec surrogate;        // mapchain
  int r = 1;                      // mapchain
  int s = 1;                      // mapchain
  std::vector<LevelSpec> ladder;  // tempered, deepest level last

  void validate(Eigen::Index n, Eigen::Index dim) const;
  /// Surrogate summary such as "sod:60" or "sod:60,sod:30"; empty for standard.
  std::string label() const;
};

struct RunConfig {
  DatasetSpec dataset;
  MethodSpec method;
  double prior_mean = 0.0;
  double prior_sd = 3.0;
  int iterations = 2000;
  std::uint64_t chain_seed = 1;
  std::string trace_path;  // empty: keep in memory only

  void validate() const;
};

RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_json(const RunConfig& config);

/// Several methods on one dataset.
struct CompareConfig {
  std::vector<RunConfig> runs;
  std::string report_csv;
  std::string report_table;
  bool parallel = false;
};

CompareConfig parse_compare_config(std::string_view json_text);
CompareConfig load_compare_config(const std::filesystem::path& path);

struct RunSummary {
  ChainTrace trace;
  std::optional<double> acceptance_rate;  // none for the standard method
  double total_cpu_seconds = 0.0;
  std::uint64_t exact_evals = 0;
  std::uint64_t surrogate_evals = 0;
  std::uint64_t rejected_nonfinite = 0;
};

/// CPU time consumed by the calling thread, in seconds.
double thread_cpu_seconds();

RunSummary run_experiment(const RunConfig& config);
/// Same, on data already in memory (must match config.dataset).
RunSummary run_experiment(const RunConfig& config, const Dataset& data);

struct Comparison {
  EfficiencyReport report;
  std::vector<RunSummary> runs;
};

/// Runs every config on the shared dataset and builds the efficiency
/// report. Rejects configs whose dataset specs differ or that lack a
/// standard-method run.
Comparison compare_methods(const std::vector<RunConfig>& configs, bool parallel = false,
                           double burn_in_fraction = 1.0 / 3.0);

}  // namespace gpmc
