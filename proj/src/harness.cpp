#include "gpmc/harness.hpp"

#include "gpmc/trace_io.hpp"

#include <json.hpp>

#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gpmc {

using nlohmann::json;

std::string to_string(LengthScaleProfile profile) {
  return profile == LengthScaleProfile::Short ? "short" : "long";
}

LengthScaleProfile parse_profile(std::string_view name) {
  if (name == "short") return LengthScaleProfile::Short;
  if (name == "long") return LengthScaleProfile::Long;
  throw std::invalid_argument("length-scale profile must be 'short' or 'long', got '" +
                              std::string(name) + "'");
}

std::string to_string(KernelMode mode) { return mode == KernelMode::Isotropic ? "iso" : "ard"; }

KernelMode parse_kernel_mode(std::string_view name) {
  if (name == "iso" || name == "isotropic") return KernelMode::Isotropic;
  if (name == "ard") return KernelMode::Ard;
  throw std::invalid_argument("kernel mode must be 'iso' or 'ard', got '" + std::string(name) + "'");
}

void DatasetSpec::validate() const {
  if (!path) {
    if (n < 2) throw std::invalid_argument("dataset needs n >= 2");
  }
  if (p < 1) throw std::invalid_argument("dataset needs p >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be nonnegative");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
}

Eigen::VectorXd DatasetSpec::length_scales() const {
  const double base = profile == LengthScaleProfile::Short ? 0.1 : 2.0;
  if (mode == KernelMode::Isotropic) return Eigen::VectorXd::Constant(1, base);
  return base * Eigen::VectorXd::LinSpaced(p, 1.0, static_cast<double>(p));
}

Hyperparams DatasetSpec::generating_hyperparams() const {
  validate();
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("sampling needs sigma > 0 at the starting point");
  }
  Hyperparams h;
  h.log_eta = std::log(eta);
  h.log_sigma = std::log(sigma);
  h.log_ls = length_scales().array().log();
  h.c = c;
  return h;
}

std::string DatasetSpec::id() const {
  std::ostringstream os;
  os << std::setprecision(17);
  if (path) {
    os << "file=" << *path;
  } else {
    os << "n=" << n << ";p=" << p << ";kernel=" << to_string(mode)
       << ";length_scale=" << to_string(profile) << ";eta=" << eta << ";sigma=" << sigma
       << ";c=" << c << ";seed=" << seed;
  }
  return os.str();
}

Eigen::VectorXd sample_gp_outputs(const Eigen::MatrixXd& X, const DatasetSpec& spec,
                                  std::mt19937_64& rng) {
  spec.validate();
  if (X.cols() != spec.p) throw std::invalid_argument("covariate matrix does not have p columns");
  const Eigen::Index n = X.rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);

  Dataset shell{X, Eigen::VectorXd::Zero(n)};
  Hyperparams theta;
  theta.log_eta = std::log(spec.eta);
  theta.log_sigma = 0.0;  // noise is added below so that sigma = 0 is allowed
  theta.log_ls = spec.length_scales().array().log();
  theta.c = spec.c;
  Eigen::MatrixXd C = build_cov_matrix(shell, theta, false);
  C.diagonal().array() += spec.sigma * spec.sigma;

  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() == Eigen::Success) return llt.matrixL() * z;

  // Semidefinite C (for instance sigma = 0 with repeated rows): draw through
  // a pivoted LDL^T so that perfectly correlated outputs stay equal.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
  const Eigen::VectorXd D = ldlt.vectorD();
  const double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || D.minCoeff() < -1e-8 * scale) {
    throw NotPositiveDefinite("covariance for data generation is not positive semidefinite", 0.0);
  }
  Eigen::VectorXd w = D.cwiseMax(0.0).cwiseSqrt().cwiseProduct(z);
  w = ldlt.matrixL() * w;
  return ldlt.transpositionsP().transpose() * w;
}

Dataset gen_synthetic(const DatasetSpec& spec) {
  spec.validate();
  if (spec.path) throw std::invalid_argument("gen_synthetic called on a file-backed dataset spec");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Dataset data;
  data.X.resize(spec.n, spec.p);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index k = 0; k < spec.p; ++k) data.X(i, k) = unif(rng);
  }
  data.y = sample_gp_outputs(data.X, spec, rng);
  data.validate();
  return data;
}

Dataset materialize(const DatasetSpec& spec) {
  if (!spec.path) return gen_synthetic(spec);
  Dataset data = load_dataset(*spec.path);
  if (data.p() != spec.p) {
    throw std::invalid_argument("dataset file has p=" + std::to_string(data.p()) +
                                " but the spec says p=" + std::to_string(spec.p));
  }
  if (data.n() < 2) throw std::invalid_argument("dataset file needs at least 2 rows");
  return data;
}

std::string to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::Standard: return "standard";
    case MethodKind::Mapchain: return "mapchain";
    case MethodKind::Tempered: return "tempered";
  }
  return "unknown";
}

MethodKind parse_method_kind(std::string_view name) {
  if (name == "standard") return MethodKind::Standard;
  if (name == "mapchain") return MethodKind::Mapchain;
  if (name == "tempered") return MethodKind::Tempered;
  throw std::invalid_argument("method must be standard, mapchain or tempered, got '" +
                              std::string(name) + "'");
}

std::string to_string(SweepOrder order) {
  switch (order) {
    case SweepOrder::Ascending: return "ascending";
    case SweepOrder::Descending: return "descending";
    case SweepOrder::Palindromic: return "palindromic";
  }
  return "unknown";
}

SweepOrder parse_sweep_order(std::string_view name) {
  if (name == "ascending") return SweepOrder::Ascending;
  if (name == "descending") return SweepOrder::Descending;
  if (name == "palindromic") return SweepOrder::Palindromic;
  throw std::invalid_argument("sweep order must be ascending, descending or palindromic");
}

void MethodSpec::validate(Eigen::Index n, Eigen::Index dim) const {
  slice.validate(dim);
  switch (kind) {
    case MethodKind::Standard:
      break;
    case MethodKind::Mapchain: {
      surrogate.validate(n);
      MapChainConfig{r, s, slice, order}.validate(dim);
      break;
    }
    case MethodKind::Tempered:
      if (ladder.empty()) throw std::invalid_argument("tempered method needs a ladder");
      for (const LevelSpec& level : ladder) {
        level.surrogate.validate(n);
        if (level.repeats < 1) throw std::invalid_argument("ladder repeats must be >= 1");
      }
      break;
  }
}

std::string MethodSpec::label() const {
  switch (kind) {
    case MethodKind::Standard: return "";
    case MethodKind::Mapchain: return surrogate.label();
    case MethodKind::Tempered: {
      std::string out;
      for (const LevelSpec& level : ladder) {
        if (!out.empty()) out += ";";
        out += level.surrogate.label();
      }
      return out;
    }
  }
  return "";
}

void RunConfig::validate() const {
  dataset.validate();
  if (iterations < 10) throw std::invalid_argument("iterations must be at least 10");
  if (!(prior_sd > 0.0) || !std::isfinite(prior_mean)) {
    throw std::invalid_argument("prior needs finite mean and positive sd");
  }
  const Hyperparams start = dataset.generating_hyperparams();
  // File-backed data may have any n; the surrogate sizes are checked again once loaded.
  const Eigen::Index n = dataset.path ? std::numeric_limits<Eigen::Index>::max() : dataset.n;
  method.validate(n, start.dim());
}

namespace {

// Rejects keys that are not part of the schema so that typos do not pass silently.
void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const char* where) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto key : allowed) ok = ok || item.key() == key;
    if (!ok) {
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
    }
  }
}

SurrogateSpec surrogate_from_json(const json& j, const char* where) {
  check_keys(j, {"method", "m", "seed", "repeats"}, where);
  SurrogateSpec spec;
  spec.method = parse_surrogate_method(j.at("method").get<std::string>());
  spec.m = j.at("m").get<Eigen::Index>();
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

json surrogate_to_json(const SurrogateSpec& spec) {
  return json{{"method", to_string(spec.method)}, {"m", spec.m}, {"seed", spec.seed}};
}

DatasetSpec dataset_from_json(const json& j) {
  check_keys(j, {"n", "p", "kernel", "length_scale", "eta", "sigma", "c", "seed", "path"}, "dataset");
  DatasetSpec spec;
  spec.n = j.value("n", spec.n);
  spec.p = j.value("p", spec.p);
  if (j.contains("kernel")) spec.mode = parse_kernel_mode(j.at("kernel").get<std::string>());
  if (j.contains("length_scale")) spec.profile = parse_profile(j.at("length_scale").get<std::string>());
  spec.eta = j.value("eta", spec.eta);
  spec.sigma = j.value("sigma", spec.sigma);
  spec.c = j.value("c", spec.c);
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("path") && !j.at("path").is_null()) spec.path = j.at("path").get<std::string>();
  return spec;
}

json dataset_to_json(const DatasetSpec& spec) {
  json j{{"n", spec.n},         {"p", spec.p},         {"kernel", to_string(spec.mode)},
         {"length_scale", to_string(spec.profile)}, {"eta", spec.eta},
         {"sigma", spec.sigma}, {"c", spec.c},         {"seed", spec.seed}};
  if (spec.path) j["path"] = *spec.path;
  return j;
}

MethodSpec method_from_json(const json& j) {
  check_keys(j, {"kind", "slice", "order", "surrogate", "r", "s", "ladder", "name"}, "method");
  MethodSpec spec;
  spec.kind = parse_method_kind(j.at("kind").get<std::string>());
  if (j.contains("slice")) {
    const json& s = j.at("slice");
    check_keys(s, {"w", "max_steps"}, "slice");
    if (s.contains("w")) {
      spec.slice.w = s.at("w").is_array() ? s.at("w").get<std::vector<double>>()
                                          : std::vector<double>{s.at("w").get<double>()};
    }
    spec.slice.max_steps = s.value("max_steps", spec.slice.max_steps);
  }
  if (j.contains("order")) spec.order = parse_sweep_order(j.at("order").get<std::string>());
  if (j.contains("surrogate")) spec.surrogate = surrogate_from_json(j.at("surrogate"), "surrogate");
  spec.r = j.value("r", spec.r);
  spec.s = j.value("s", spec.s);
  if (j.contains("ladder")) {
    for (const json& level : j.at("ladder")) {
      spec.ladder.push_back({surrogate_from_json(level, "ladder level"), level.value("repeats", 1)});
    }
  }
  return spec;
}

json method_to_json(const MethodSpec& spec) {
  json j{{"kind", to_string(spec.kind)},
         {"slice", {{"w", spec.slice.w}, {"max_steps", spec.slice.max_steps}}},
         {"order", to_string(spec.order)}};
  if (spec.kind == MethodKind::Mapchain) {
    j["surrogate"] = surrogate_to_json(spec.surrogate);
    j["r"] = spec.r;
    j["s"] = spec.s;
  }
  if (spec.kind == MethodKind::Tempered) {
    json ladder = json::array();
    for (const LevelSpec& level : spec.ladder) {
      json l = surrogate_to_json(level.surrogate);
      l["repeats"] = level.repeats;
      ladder.push_back(l);
    }
    j["ladder"] = ladder;
  }
  return j;
}

void apply_run_fields(const json& j, RunConfig& config) {
  if (j.contains("dataset")) config.dataset = dataset_from_json(j.at("dataset"));
  if (j.contains("prior")) {
    check_keys(j.at("prior"), {"mean", "sd"}, "prior");
    config.prior_mean = j.at("prior").value("mean", config.prior_mean);
    config.prior_sd = j.at("prior").value("sd", config.prior_sd);
  }
  config.iterations = j.value("iterations", config.iterations);
  config.chain_seed = j.value("chain_seed", config.chain_seed);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  const json j = json::parse(json_text);
  check_keys(j, {"dataset", "method", "prior", "iterations", "chain_seed", "output"}, "run config");
  RunConfig config;
  apply_run_fields(j, config);
  if (j.contains("method")) config.method = method_from_json(j.at("method"));
  if (j.contains("output")) {
    check_keys(j.at("output"), {"trace"}, "output");
    config.trace_path = j.at("output").value("trace", std::string{});
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(slurp(path)); }

std::string run_config_json(const RunConfig& config) {
  json j{{"dataset", dataset_to_json(config.dataset)},
         {"method", method_to_json(config.method)},
         {"prior", {{"mean", config.prior_mean}, {"sd", config.prior_sd}}},
         {"iterations", config.iterations},
         {"chain_seed", config.chain_seed}};
  if (!config.trace_path.empty()) j["output"] = {{"trace", config.trace_path}};
  return j.dump(2);
}

CompareConfig parse_compare_config(std::string_view json_text) {
  const json j = json::parse(json_text);
  check_keys(j, {"dataset", "methods", "prior", "iterations", "chain_seed", "output", "parallel"},
             "compare config");
  RunConfig base;
  apply_run_fields(j, base);
  CompareConfig out;
  out.parallel = j.value("parallel", false);
  std::string trace_dir;
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"dir", "report_csv", "report_table"}, "output");
    trace_dir = o.value("dir", std::string{});
    out.report_csv = o.value("report_csv", std::string{});
    out.report_table = o.value("report_table", std::string{});
  }
  std::size_t index = 0;
  for (const json& m : j.at("methods")) {
    RunConfig config = base;
    config.method = method_from_json(m);
    if (!trace_dir.empty()) {
      const std::string name = m.value("name", to_string(config.method.kind) + "_" + std::to_string(index));
      config.trace_path = (std::filesystem::path(trace_dir) / (name + ".csv")).string();
    }
    config.validate();
    out.runs.push_back(std::move(config));
    ++index;
  }
  return out;
}

CompareConfig load_compare_config(const std::filesystem::path& path) {
  return parse_compare_config(slurp(path));
}

double thread_cpu_seconds() {
  timespec ts{};
  if (clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts) != 0) {
    throw std::runtime_error("thread CPU clock unavailable");
  }
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

namespace {

std::vector<std::pair<std::string, std::string>> trace_metadata(const RunConfig& config) {
  std::ostringstream w;
  for (std::size_t i = 0; i < config.method.slice.w.size(); ++i) {
    w << (i ? ";" : "") << format_double(config.method.slice.w[i]);
  }
  std::vector<std::pair<std::string, std::string>> meta{
      {"n", std::to_string(config.dataset.n)},
      {"p", std::to_string(config.dataset.p)},
      {"kernel", to_string(config.dataset.mode)},
      {"length_scale", to_string(config.dataset.profile)},
      {"eta", format_double(config.dataset.eta)},
      {"sigma", format_double(config.dataset.sigma)},
      {"c", format_double(config.dataset.c)},
      {"data_seed", std::to_string(config.dataset.seed)},
      {"chain_seed", std::to_string(config.chain_seed)},
      {"iterations", std::to_string(config.iterations)},
      {"prior_mean", format_double(config.prior_mean)},
      {"prior_sd", format_double(config.prior_sd)},
      {"slice_w", w.str()},
      {"slice_max_steps", std::to_string(config.method.slice.max_steps)},
      {"sweep_order", to_string(config.method.order)},
  };
  if (config.method.kind == MethodKind::Mapchain) {
    meta.emplace_back("r", std::to_string(config.method.r));
    meta.emplace_back("s", std::to_string(config.method.s));
  }
  if (config.method.kind == MethodKind::Tempered) {
    std::string repeats;
    for (const LevelSpec& level : config.method.ladder) {
      repeats += (repeats.empty() ? "" : ";") + std::to_string(level.repeats);
    }
    meta.emplace_back("ladder_repeats", repeats);
  }
  return meta;
}

}  // namespace

RunSummary run_experiment(const RunConfig& config) {
  config.validate();
  return run_experiment(config, materialize(config.dataset));
}

RunSummary run_experiment(const RunConfig& config, const Dataset& data) {
  config.validate();
  data.validate();
  const Hyperparams start = config.dataset.generating_hyperparams();
  start.validate(data.p());
  const Eigen::Index dim = start.dim();
  config.method.validate(data.n(), dim);

  const GpProblem problem{data, PriorSpec::independent(dim, config.prior_mean, config.prior_sd),
                          config.dataset.c};
  LogDensity exact = make_exact_density(problem);
  std::vector<LogDensity> surrogates;
  switch (config.method.kind) {
    case MethodKind::Standard:
      break;
    case MethodKind::Mapchain:
      surrogates.push_back(build_surrogate(problem, config.method.surrogate));
      break;
    case MethodKind::Tempered:
      break;
  }
  Ladder ladder;
  ladder.up_order = config.method.order;
  if (config.method.kind == MethodKind::Tempered) {
    for (const LevelSpec& level : config.method.ladder) {
      ladder.levels.push_back(
          {build_surrogate(problem, level.surrogate), level.repeats, config.method.slice});
    }
  }
  const MapChainConfig mc{config.method.r, config.method.s, config.method.slice, config.method.order};

  auto surrogate_count = [&]() {
    std::uint64_t total = 0;
    for (const auto& s : surrogates) total += s.eval_count();
    for (const auto& l : ladder.levels) total += l.density.eval_count();
    return total;
  };

  RunSummary summary;
  ChainTrace& trace = summary.trace;
  trace.method = to_string(config.method.kind);
  trace.label = config.method.label();
  trace.dataset_id = config.dataset.id();
  trace.param_names = start.names();
  trace.metadata = trace_metadata(config);

  Rng rng(config.chain_seed);
  Eigen::VectorXd x = start.to_vector();
  double log_post = exact(x);
  if (!std::isfinite(log_post)) {
    throw std::domain_error("log posterior is not finite at the starting hyperparameters");
  }
  double log_sur = surrogates.empty() ? 0.0 : surrogates.front()(x);
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;

  for (int it = 0; it < config.iterations; ++it) {
    const std::uint64_t exact_before = exact.eval_count();
    const std::uint64_t surrogate_before = surrogate_count();
    const double t0 = thread_cpu_seconds();
    try {
      switch (config.method.kind) {
        case MethodKind::Standard: {
          SliceState next = sweep(SliceState{x, log_post}, exact, config.method.slice, rng,
                                  config.method.order);
          x = std::move(next.x);
          log_post = next.log_density;
          break;
        }
        case MethodKind::Mapchain: {
          MapChainStep step = mapchain_transition(ChainPoint{x, log_post, log_sur}, mc, exact,
                                                  surrogates.front(), rng);
          attempts += static_cast<std::uint64_t>(step.attempts);
          accepted += static_cast<std::uint64_t>(step.accepted);
          x = std::move(step.next.x);
          log_post = step.next.log_exact;
          log_sur = step.next.log_surrogate;
          break;
        }
        case MethodKind::Tempered: {
          TemperedStep step = tempered_transition(x, log_post, exact, ladder, rng);
          ++attempts;
          if (step.accepted) ++accepted;
          if (!step.diagnostic.empty()) ++summary.rejected_nonfinite;
          x = std::move(step.x);
          log_post = step.log_exact;
          break;
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(it) + ": " + e.what());
    }
    const double seconds = thread_cpu_seconds() - t0;
    const double log_lik = log_post - log_prior(x, problem.prior);
    trace.push(x, log_lik, std::max(seconds, 0.0), exact.eval_count() - exact_before,
               surrogate_count() - surrogate_before);
    summary.total_cpu_seconds += seconds;
  }

  summary.exact_evals = exact.eval_count();
  summary.surrogate_evals = surrogate_count();
  if (config.method.kind != MethodKind::Standard) {
    summary.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(attempts);
    trace.metadata.emplace_back("acceptance_rate", format_double(*summary.acceptance_rate));
  }
  if (!config.trace_path.empty()) save_trace(config.trace_path, trace);
  return summary;
}

Comparison compare_methods(const std::vector<RunConfig>& configs, bool parallel,
                           double burn_in_fraction) {
  if (configs.empty()) throw std::invalid_argument("nothing to compare");
  bool has_standard = false;
  for (const RunConfig& config : configs) {
    config.validate();
    if (!(config.dataset == configs.front().dataset)) {
      throw std::invalid_argument("compared runs must share one dataset spec");
    }
    has_standard = has_standard || config.method.kind == MethodKind::Standard;
  }
  if (!has_standard) throw std::invalid_argument("comparison needs a standard-method run");

  const Dataset data = materialize(configs.front().dataset);
  Comparison out;
  out.runs.resize(configs.size());
  if (parallel && configs.size() > 1) {
    std::vector<std::exception_ptr> errors(configs.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          out.runs[i] = run_experiment(configs[i], data);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t i = 0; i < configs.size(); ++i) out.runs[i] = run_experiment(configs[i], data);
  }
  std::vector<ChainTrace> traces;
  for (const auto& run : out.runs) traces.push_back(run.trace);
  out.report = efficiency_report(traces, burn_in_fraction);
  return out;
}

}  // namespace gpmc
