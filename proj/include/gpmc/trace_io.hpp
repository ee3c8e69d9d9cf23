#pragma once

#include "gpmc/diagnostics.hpp"
#include "gpmc/model_core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace gpmc {

// Trace CSV: "# key=value" metadata lines, then the header
// iteration,log_lik,<param names>,cpu_seconds,exact_evals,surrogate_evals
// and one row per iteration. Doubles are written in shortest round-trip form.
void write_trace(std::ostream& out, const ChainTrace& trace);
ChainTrace read_trace(std::istream& in);
void save_trace(const std::filesystem::path& path, const ChainTrace& trace);
ChainTrace load_trace(const std::filesystem::path& path);

// Dataset CSV: header x1..xp,y then one row per case.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace gpmc
