#include "gpmc/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace gpmc {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    // Spellings of non-finite values that from_chars may not accept.
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan" || text == "-nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t parse_count(std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a count: '" + std::string(text) + "'");
  }
  return v;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

}  // namespace

void write_trace(std::ostream& out, const ChainTrace& trace) {
  trace.validate();
  out << "# method=" << trace.method << '\n';
  out << "# label=" << trace.label << '\n';
  out << "# dataset_id=" << trace.dataset_id << '\n';
  for (const auto& [key, value] : trace.metadata) out << "# " << key << '=' << value << '\n';
  out << "iteration,log_lik";
  for (const auto& name : trace.param_names) out << ',' << name;
  out << ",cpu_seconds,exact_evals,surrogate_evals\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << format_double(trace.log_lik[i]);
    for (Eigen::Index k = 0; k < trace.theta[i].size(); ++k) out << ',' << format_double(trace.theta[i][k]);
    out << ',' << format_double(trace.cpu_seconds[i]) << ',' << trace.exact_evals[i] << ','
        << trace.surrogate_evals[i] << '\n';
  }
}

ChainTrace read_trace(std::istream& in) {
  ChainTrace trace;
  std::string line;
  bool have_header = false;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    if (!have_header && line.rfind("# ", 0) == 0) {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("malformed metadata line " + std::to_string(line_no));
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "method") {
        trace.method = value;
      } else if (key == "label") {
        trace.label = value;
      } else if (key == "dataset_id") {
        trace.dataset_id = value;
      } else {
        trace.metadata.emplace_back(key, value);
      }
      continue;
    }
    const auto fields = split(line);
    if (!have_header) {
      if (fields.size() < 5 || fields[0] != "iteration" || fields[1] != "log_lik" ||
          fields[fields.size() - 3] != "cpu_seconds" || fields[fields.size() - 2] != "exact_evals" ||
          fields.back() != "surrogate_evals") {
        throw std::invalid_argument("trace header missing or malformed");
      }
      for (std::size_t k = 2; k + 3 < fields.size(); ++k) trace.param_names.emplace_back(fields[k]);
      columns = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != columns) {
      throw std::invalid_argument("trace row " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(columns));
    }
    if (parse_count(fields[0]) != trace.size()) {
      throw std::invalid_argument("trace rows out of order at line " + std::to_string(line_no));
    }
    Eigen::VectorXd theta(static_cast<Eigen::Index>(trace.param_names.size()));
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta[k] = parse_double(fields[2 + static_cast<std::size_t>(k)]);
    trace.push(std::move(theta), parse_double(fields[1]), parse_double(fields[columns - 3]),
               parse_count(fields[columns - 2]), parse_count(fields[columns - 1]));
  }
  if (!have_header) throw std::invalid_argument("trace header missing");
  trace.validate();
  return trace;
}

void save_trace(const std::filesystem::path& path, const ChainTrace& trace) {
  auto out = open_out(path);
  write_trace(out, trace);
}

ChainTrace load_trace(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trace(in);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  data.validate();
  for (Eigen::Index k = 0; k < data.p(); ++k) out << 'x' << (k + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index k = 0; k < data.p(); ++k) out << format_double(data.X(i, k)) << ',';
    out << format_double(data.y[i]) << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset file is empty");
  strip_cr(line);
  const auto header = split(line);
  if (header.size() < 2 || header.back() != "y") {
    throw std::invalid_argument("dataset header must be x1..xp,y");
  }
  const std::size_t p = header.size() - 1;
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != p + 1) {
      throw std::invalid_argument("dataset row " + std::to_string(line_no) + " has wrong field count");
    }
    for (std::size_t k = 0; k < p; ++k) xs.push_back(parse_double(fields[k]));
    ys.push_back(parse_double(fields[p]));
  }
  Dataset data;
  const auto n = static_cast<Eigen::Index>(ys.size());
  data.X.resize(n, static_cast<Eigen::Index>(p));
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) data.X(i, static_cast<Eigen::Index>(k)) = xs[static_cast<std::size_t>(i) * p + k];
    data.y[i] = ys[static_cast<std::size_t>(i)];
  }
  data.validate();
  return data;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  write_dataset(out, data);
}

Dataset load_dataset(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

}  // namespace gpmc
