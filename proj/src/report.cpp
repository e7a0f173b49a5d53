#include "sbl/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sbl {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace, bool with_timings) {
  os << "iter,objective,gamma_rel_change,active_count,elapsed_ms\n";
  for (const IterationRecord& r : trace.records) {
    os << r.iter << ',' << format_double(r.objective) << ',' << format_double(r.gamma_rel_change)
       << ',' << r.active_count << ',' << format_double(with_timings ? r.elapsed_ms : 0.0)
       << '\n';
  }
}

void write_trace_csv(const std::string& path, const ConvergenceTrace& trace, bool with_timings) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  write_trace_csv(os, trace, with_timings);
}

namespace {

nlohmann::ordered_json config_json(const AlgorithmConfig& config) {
  nlohmann::ordered_json j;
  j["tau"] = config.tau;
  j["epsilon"] = config.epsilon;
  j["eta0"] = config.eta0;
  j["rel_tol"] = config.rel_tol;
  j["prune_tol"] = config.prune_tol;
  j["max_iters"] = config.max_iters;
  return j;
}

}  // namespace

std::string summary_json(const RunResult& result, Algorithm alg, const AlgorithmConfig& config) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(alg);
  j["status"] = to_string(result.trace.status);
  j["iterations"] = result.trace.iterations();
  j["final_objective"] = result.trace.final_objective();
  j["gamma_size"] = result.gamma.size();
  j["active_count"] = result.gamma.active_count();
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (Eigen::Index i : result.gamma.active_indices()) {
    entries.push_back({i, result.gamma[i]});
  }
  j["gamma"] = entries;
  j["config"] = config_json(config);
  return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const RunResult& result, Algorithm alg,
                        const AlgorithmConfig& config) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  os << summary_json(result, alg, config);
}

SummaryData parse_summary_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("summary JSON parse failure: ") + e.what());
  }
  SummaryData out;
  try {
    out.algorithm = j.at("algorithm").get<std::string>();
    out.status = j.at("status").get<std::string>();
    out.iterations = j.at("iterations").get<int>();
    const auto& fo = j.at("final_objective");
    out.final_objective =
        fo.is_null() ? std::numeric_limits<double>::quiet_NaN() : fo.get<double>();
    out.gamma_size = j.at("gamma_size").get<Eigen::Index>();
    for (const auto& entry : j.at("gamma")) {
      out.gamma_entries.emplace_back(entry.at(0).get<Eigen::Index>(), entry.at(1).get<double>());
    }
    const auto& c = j.at("config");
    out.config.tau = c.at("tau").get<double>();
    out.config.epsilon = c.at("epsilon").get<double>();
    out.config.eta0 = c.at("eta0").get<double>();
    out.config.rel_tol = c.at("rel_tol").get<double>();
    out.config.prune_tol = c.at("prune_tol").get<double>();
    out.config.max_iters = c.at("max_iters").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("summary JSON missing field: ") + e.what());
  }
  return out;
}

}  // namespace sbl
