#include "gpmc/diagnostics.hpp"
#include "gpmc/harness.hpp"
#include "gpmc/trace_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace gpmc;

struct DatasetFlags {
  std::optional<Eigen::Index> n, p;
  std::optional<std::string> kernel, length_scale, path;
  std::optional<double> eta, sigma, c;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--n", n, "number of cases");
    app->add_option("--p", p, "number of covariates");
    app->add_option("--kernel", kernel, "iso or ard")->check(CLI::IsMember({"iso", "ard"}));
    app->add_option("--length-scale", length_scale, "short or long")
        ->check(CLI::IsMember({"short", "long"}));
    app->add_option("--eta", eta, "generating eta");
    app->add_option("--sigma", sigma, "generating residual sd");
    app->add_option("--c", c, "constant kernel term");
    app->add_option("--data-seed", seed, "dataset seed");
    app->add_option("--data", path, "read the dataset from this CSV instead of generating it");
  }

  void apply(DatasetSpec& spec) const {
    if (n) spec.n = *n;
    if (p) spec.p = *p;
    if (kernel) spec.mode = parse_kernel_mode(*kernel);
    if (length_scale) spec.profile = parse_profile(*length_scale);
    if (eta) spec.eta = *eta;
    if (sigma) spec.sigma = *sigma;
    if (c) spec.c = *c;
    if (seed) spec.seed = *seed;
    if (path) spec.path = *path;
  }
};

SurrogateSpec parse_surrogate_token(const std::string& token, std::uint64_t seed) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("surrogate must look like sod:40");
  SurrogateSpec spec;
  spec.method = parse_surrogate_method(token.substr(0, colon));
  spec.m = std::stol(token.substr(colon + 1));
  spec.seed = seed;
  return spec;
}

struct RunFlags {
  std::optional<std::string> config_path, method, surrogate, ladder, order, trace;
  std::optional<std::uint64_t> surrogate_seed, chain_seed;
  std::optional<int> r, s, repeats, iterations, max_steps;
  std::optional<std::vector<double>> w;
  DatasetFlags dataset;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration");
    dataset.add(app);
    app->add_option("--method", method, "standard, mapchain or tempered")
        ->check(CLI::IsMember({"standard", "mapchain", "tempered"}));
    app->add_option("--surrogate", surrogate, "mapchain surrogate, e.g. sod:40 or nystrom:60");
    app->add_option("--ladder", ladder, "tempered levels, e.g. sod:40,sod:20");
    app->add_option("--repeats", repeats, "sweeps per tempered level");
    app->add_option("--surrogate-seed", surrogate_seed, "seed choosing surrogate subsets");
    app->add_option("--r", r, "mark moves per mapping");
    app->add_option("--s", s, "mark proposal offset");
    app->add_option("--w", w, "slice step size (one value, or one per hyperparameter)");
    app->add_option("--max-steps", max_steps, "stepping-out cap M");
    app->add_option("--order", order, "ascending, descending or palindromic");
    app->add_option("--iterations", iterations, "chain length");
    app->add_option("--chain-seed", chain_seed, "chain seed");
    app->add_option("--trace", trace, "output trace CSV");
  }

  RunConfig build() const {
    RunConfig config;
    if (config_path) config = load_run_config(*config_path);
    dataset.apply(config.dataset);
    MethodSpec& m = config.method;
    if (method) m.kind = parse_method_kind(*method);
    const std::uint64_t seed = surrogate_seed.value_or(m.surrogate.seed);
    if (surrogate) m.surrogate = parse_surrogate_token(*surrogate, seed);
    else if (surrogate_seed) m.surrogate.seed = *surrogate_seed;
    if (ladder) {
      m.ladder.clear();
      std::stringstream ss(*ladder);
      std::string token;
      while (std::getline(ss, token, ',')) {
        m.ladder.push_back({parse_surrogate_token(token, seed), repeats.value_or(1)});
      }
    } else if (repeats) {
      for (auto& level : m.ladder) level.repeats = *repeats;
    }
    if (r) m.r = *r;
    if (s) m.s = *s;
    if (w) m.slice.w = *w;
    if (max_steps) m.slice.max_steps = *max_steps;
    if (order) m.order = parse_sweep_order(*order);
    if (iterations) config.iterations = *iterations;
    if (chain_seed) config.chain_seed = *chain_seed;
    if (trace) config.trace_path = *trace;
    config.validate();
    return config;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process hyperparameter MCMC with surrogate-accelerated transitions"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  DatasetFlags gen_flags;
  std::optional<std::string> gen_config;
  std::string gen_out;
  gen->add_option("--config", gen_config, "JSON run configuration supplying the dataset block");
  gen_flags.add(gen);
  gen->add_option("--out", gen_out, "output CSV")->required();

  auto* run = app.add_subcommand("run", "run one chain");
  RunFlags run_flags;
  run_flags.add(run);
  bool run_print_config = false;
  run->add_flag("--print-config", run_print_config, "print the resolved configuration");

  auto* compare = app.add_subcommand("compare", "run several methods on one dataset");
  std::string compare_config;
  std::optional<int> compare_iterations;
  std::optional<std::uint64_t> compare_seed;
  std::optional<std::string> compare_csv, compare_table;
  bool compare_parallel = false;
  DatasetFlags compare_dataset;
  compare->add_option("--config", compare_config, "JSON comparison configuration")->required();
  compare_dataset.add(compare);
  compare->add_option("--iterations", compare_iterations, "chain length for every run");
  compare->add_option("--chain-seed", compare_seed, "chain seed for every run");
  compare->add_option("--report-csv", compare_csv, "report CSV path");
  compare->add_option("--report-table", compare_table, "report text table path");
  compare->add_flag("--parallel", compare_parallel, "run member chains on separate threads");

  auto* acf_cmd = app.add_subcommand("acf", "autocorrelation diagnostics for a trace file");
  std::string acf_trace;
  double acf_burn = 1.0 / 3.0;
  int acf_lags = 20;
  acf_cmd->add_option("--trace", acf_trace, "trace CSV")->required();
  acf_cmd->add_option("--burn", acf_burn, "burn-in fraction");
  acf_cmd->add_option("--max-lag", acf_lags, "autocorrelations to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      DatasetSpec spec;
      if (gen_config) spec = load_run_config(*gen_config).dataset;
      gen_flags.apply(spec);
      spec.path.reset();
      save_dataset(gen_out, gen_synthetic(spec));
      std::cout << "wrote " << gen_out << " (" << spec.id() << ")\n";
    } else if (*run) {
      const RunConfig config = run_flags.build();
      if (run_print_config) std::cout << run_config_json(config) << '\n';
      const RunSummary summary = run_experiment(config);
      std::vector<ChainTrace> traces{summary.trace};
      const EfficiencyReport report = efficiency_report(traces);
      std::cout << "method " << summary.trace.method
                << (summary.trace.label.empty() ? "" : " " + summary.trace.label) << '\n'
                << "iterations " << summary.trace.size() << '\n'
                << "cpu_seconds " << summary.total_cpu_seconds << '\n'
                << "exact_evals " << summary.exact_evals << '\n'
                << "surrogate_evals " << summary.surrogate_evals << '\n';
      if (summary.acceptance_rate) std::cout << "acceptance_rate " << *summary.acceptance_rate << '\n';
      std::cout << "tau_log_lik " << report.rows.front().tau << '\n';
      if (!config.trace_path.empty()) std::cout << "trace " << config.trace_path << '\n';
    } else if (*compare) {
      CompareConfig cfg = load_compare_config(compare_config);
      for (RunConfig& rc : cfg.runs) {
        compare_dataset.apply(rc.dataset);
        if (compare_iterations) rc.iterations = *compare_iterations;
        if (compare_seed) rc.chain_seed = *compare_seed;
      }
      if (compare_csv) cfg.report_csv = *compare_csv;
      if (compare_table) cfg.report_table = *compare_table;
      const Comparison result = compare_methods(cfg.runs, cfg.parallel || compare_parallel);
      const std::string table = result.report.to_table();
      std::cout << table;
      if (!cfg.report_csv.empty()) write_text(cfg.report_csv, result.report.to_csv());
      if (!cfg.report_table.empty()) write_text(cfg.report_table, table);
    } else if (*acf_cmd) {
      const ChainTrace trace = load_trace(acf_trace);
      std::vector<ChainTrace> traces{trace};
      const EfficiencyReport report = efficiency_report(traces, acf_burn);
      const auto first = static_cast<std::size_t>(acf_burn * static_cast<double>(trace.size()));
      const std::span<const double> ll(trace.log_lik.data() + first, trace.size() - first);
      const ActEstimate act = act_estimate_detail(ll);
      std::cout << "samples " << ll.size() << "\n"
                << "tau_log_lik " << act.tau << " (cutoff lag " << act.cutoff << ")\n"
                << "time_per_iter " << report.rows.front().time_per_iter << '\n';
      for (std::size_t k = 0; k < trace.param_names.size(); ++k) {
        std::cout << "tau_" << trace.param_names[k] << ' ' << report.rows.front().param_tau[k] << '\n';
      }
      const int lags = std::min<int>(acf_lags, static_cast<int>(ll.size()) - 1);
      const std::vector<double> rho = acf(ll, lags);
      std::cout << "lag,acf\n";
      for (int i = 0; i < lags; ++i) std::cout << i + 1 << ',' << rho[static_cast<std::size_t>(i)] << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
