#include "gpmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gpmc {

namespace {

// Lag-by-lag autocorrelation, each lag computed only when requested.
class LazyAcf {
 public:
  explicit LazyAcf(std::span<const double> series) : centered_(series.begin(), series.end()) {
    if (centered_.size() < 2) throw std::invalid_argument("series needs at least 2 values");
    const double mean =
        std::accumulate(centered_.begin(), centered_.end(), 0.0) / static_cast<double>(centered_.size());
    for (double& v : centered_) v -= mean;
    c0_ = autocov(0);
    if (!(c0_ > 0.0) || !std::isfinite(c0_)) {
      throw std::domain_error("autocorrelation undefined for a constant series");
    }
  }

  std::size_t length() const { return centered_.size(); }

  double rho(std::size_t lag) const { return autocov(lag) / c0_; }

 private:
  double autocov(std::size_t lag) const {
    const std::size_t L = centered_.size();
    double sum = 0.0;
    for (std::size_t t = 0; t + lag < L; ++t) sum += centered_[t] * centered_[t + lag];
    return sum / static_cast<double>(L);
  }

  std::vector<double> centered_;
  double c0_ = 0.0;
};

}  // namespace

std::vector<double> acf(std::span<const double> series, int max_lag) {
  if (max_lag < 1 || series.size() <= static_cast<std::size_t>(max_lag)) {
    throw std::invalid_argument("acf needs series length > max_lag >= 1");
  }
  const LazyAcf lazy(series);
  std::vector<double> out(static_cast<std::size_t>(max_lag));
  for (int lag = 1; lag <= max_lag; ++lag) out[lag - 1] = lazy.rho(static_cast<std::size_t>(lag));
  return out;
}

ActEstimate act_estimate_detail(std::span<const double> series) {
  if (series.size() < 3) throw std::invalid_argument("tau estimate needs at least 3 values");
  const LazyAcf lazy(series);
  const std::size_t L = lazy.length();
  const double band = 1.96 / std::sqrt(static_cast<double>(L));
  const std::size_t cap = L / 3;

  ActEstimate out;
  auto rho_at = [&](std::size_t lag) {
    while (out.rho.size() < lag) out.rho.push_back(lazy.rho(out.rho.size() + 1));
    return out.rho[lag - 1];
  };
  std::size_t k = 0;
  while (k < cap) {
    if (k + 2 >= L) break;
    if (std::abs(rho_at(k + 1)) < band && std::abs(rho_at(k + 2)) < band) break;
    ++k;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) sum += rho_at(i);
  out.cutoff = static_cast<int>(k);
  out.tau = 1.0 + 2.0 * sum;
  return out;
}

double act_estimate(std::span<const double> series) { return act_estimate_detail(series).tau; }

void ChainTrace::push(Eigen::VectorXd th, double ll, double seconds, std::uint64_t exact,
                      std::uint64_t surrogate) {
  theta.push_back(std::move(th));
  log_lik.push_back(ll);
  cpu_seconds.push_back(seconds);
  exact_evals.push_back(exact);
  surrogate_evals.push_back(surrogate);
}

void ChainTrace::validate() const {
  const std::size_t L = log_lik.size();
  if (theta.size() != L || cpu_seconds.size() != L || exact_evals.size() != L ||
      surrogate_evals.size() != L) {
    throw std::invalid_argument("trace columns have different lengths");
  }
  for (const auto& th : theta) {
    if (static_cast<std::size_t>(th.size()) != param_names.size()) {
      throw std::invalid_argument("trace parameter vector does not match parameter names");
    }
  }
  for (double t : cpu_seconds) {
    if (!(t >= 0.0)) throw std::invalid_argument("trace contains a negative CPU time");
  }
}

std::vector<double> ChainTrace::parameter_series(std::size_t k) const {
  std::vector<double> out;
  out.reserve(theta.size());
  for (const auto& th : theta) out.push_back(th[static_cast<Eigen::Index>(k)]);
  return out;
}

bool ChainTrace::operator==(const ChainTrace& other) const {
  if (method != other.method || label != other.label || dataset_id != other.dataset_id ||
      param_names != other.param_names || metadata != other.metadata ||
      log_lik != other.log_lik || cpu_seconds != other.cpu_seconds ||
      exact_evals != other.exact_evals || surrogate_evals != other.surrogate_evals ||
      theta.size() != other.theta.size()) {
    return false;
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i].size() != other.theta[i].size() || theta[i] != other.theta[i]) return false;
  }
  return true;
}

EfficiencyReport make_report(std::vector<EfficiencyRow> rows) {
  EfficiencyReport report;
  const EfficiencyRow* baseline = nullptr;
  for (auto& row : rows) {
    row.product = row.tau * row.time_per_iter;
    if (!baseline && row.method == "standard") baseline = &row;
  }
  report.has_baseline = baseline != nullptr;
  if (baseline) {
    const double base = baseline->product;
    for (auto& row : rows) {
      if (&row == baseline) {
        row.ratio = 1.0;
      } else {
        row.ratio = row.product / base;
      }
    }
  } else {
    report.notes.push_back("no standard-method run: ratios omitted");
  }
  report.rows = std::move(rows);
  return report;
}

EfficiencyReport efficiency_report(std::span<const ChainTrace> traces, double burn_in_fraction) {
  if (traces.empty()) throw std::invalid_argument("efficiency report needs at least one trace");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw std::invalid_argument("burn-in fraction must lie in [0, 1)");
  }
  std::vector<EfficiencyRow> rows;
  std::vector<std::string> ids;
  for (const ChainTrace& trace : traces) {
    trace.validate();
    const std::size_t L = trace.size();
    const auto first = static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(L)));
    if (L - first < 3) throw std::invalid_argument("trace too short after burn-in");
    const std::span<const double> ll(trace.log_lik.data() + first, L - first);
    const std::span<const double> secs(trace.cpu_seconds.data() + first, L - first);

    EfficiencyRow row;
    row.method = trace.method;
    row.label = trace.label;
    row.tau = act_estimate(ll);
    row.time_per_iter = std::accumulate(secs.begin(), secs.end(), 0.0) / static_cast<double>(secs.size());
    for (std::size_t k = 0; k < trace.param_names.size(); ++k) {
      const std::vector<double> series = trace.parameter_series(k);
      try {
        row.param_tau.push_back(act_estimate(std::span<const double>(series).subspan(first)));
      } catch (const std::domain_error&) {
        row.param_tau.push_back(std::nan(""));
      }
    }
    rows.push_back(std::move(row));
    ids.push_back(trace.dataset_id);
  }

  EfficiencyReport report = make_report(std::move(rows));
  report.param_names = traces.front().param_names;
  for (const ChainTrace& trace : traces) {
    if (trace.param_names != report.param_names) {
      report.param_names.clear();
      break;
    }
  }
  if (report.has_baseline) {
    std::size_t base = 0;
    while (report.rows[base].method != "standard") ++base;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      if (ids[i] != ids[base]) {
        report.rows[i].ratio.reset();
        report.notes.push_back("row " + std::to_string(i) +
                               " is on a different dataset than the baseline: no ratio");
      }
    }
  }
  return report;
}

namespace {

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

std::string EfficiencyReport::to_table() const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"method", "m", "tau", "time/iter", "product", "ratio"});
  for (const auto& row : rows) {
    cells.push_back({row.method, row.label.empty() ? "-" : row.label, fmt(row.tau, 4),
                     fmt(row.time_per_iter, 4), fmt(row.product, 4),
                     row.ratio ? fmt(*row.ratio, 3) : "n/a"});
  }
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (std::size_t j = 0; j < line.size(); ++j) widths[j] = std::max(widths[j], line[j].size());
  }
  std::ostringstream os;
  for (const auto& line : cells) {
    for (std::size_t j = 0; j < line.size(); ++j) {
      if (j) os << "  ";
      if (j < 2) {
        os << std::left << std::setw(static_cast<int>(widths[j])) << line[j];
      } else {
        os << std::right << std::setw(static_cast<int>(widths[j])) << line[j];
      }
    }
    os << '\n';
  }
  for (const auto& note : notes) os << "# " << note << '\n';
  return os.str();
}

std::string EfficiencyReport::to_csv() const {
  std::ostringstream os;
  os << "method,m,tau,time_per_iter,product,ratio";
  for (const auto& name : param_names) os << ",tau_" << name;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& row : rows) {
    os << row.method << ",\"" << row.label << "\"," << row.tau << ',' << row.time_per_iter << ','
       << row.product << ',';
    if (row.ratio) os << *row.ratio;
    if (row.param_tau.size() == param_names.size()) {
      for (double t : row.param_tau) os << ',' << t;
    }
    os << '\n';
  }
  return os.str();
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * d;

  // Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
  // Below 0.2 the tail equals 1 to double precision and the series converges slowly.
  double q = 1.0;
  if (lambda > 0.2) {
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
      const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
      sum += term;
      if (std::abs(term) < 1e-16 * std::abs(sum)) break;
      sign = -sign;
    }
    q = std::clamp(2.0 * sum, 0.0, 1.0);
  }
  return KsResult{d, q};
}

MeanEstimate mcmc_mean(std::span<const double> series) {
  const ActEstimate act = act_estimate_detail(series);
  const double L = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / L;
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  const double var = ss / (L - 1.0);
  return MeanEstimate{mean, std::sqrt(std::max(act.tau, 0.0) * var / L), act.tau};
}

}  // namespace gpmc
