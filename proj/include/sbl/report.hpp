#pragma once

#include <iosfwd>
#include <string>

#include "sbl/runner.hpp"

namespace sbl {

// Shortest round-trip decimal form of a double (to_chars), "nan"/"inf" spelled out.
std::string format_double(double value);

// CSV with header iter,objective,gamma_rel_change,active_count,elapsed_ms.
// Wall times are written as 0 unless with_timings is set, keeping exports
// byte-stable across reruns.
void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace, bool with_timings = false);
void write_trace_csv(const std::string& path, const ConvergenceTrace& trace,
                     bool with_timings = false);

// JSON summary of a finished run: status, iterations, final objective, active
// count, sparse gamma as [index, value] pairs, and the config it ran with.
std::string summary_json(const RunResult& result, Algorithm alg, const AlgorithmConfig& config);
void write_summary_json(const std::string& path, const RunResult& result, Algorithm alg,
                        const AlgorithmConfig& config);

struct SummaryData {
  std::string algorithm;
  std::string status;
  int iterations = 0;
  double final_objective = 0.0;
  Eigen::Index gamma_size = 0;
  std::vector<std::pair<Eigen::Index, double>> gamma_entries;
  AlgorithmConfig config;
};

// Parses what summary_json wrote; round-trips exactly.
SummaryData parse_summary_json(const std::string& text);

}  // namespace sbl
