#include "sbl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sbl/matio.hpp"
#include "sbl/report.hpp"

namespace sbl {

namespace fs = std::filesystem;

namespace {

std::string short_number(double v) {
  std::ostringstream os;
  os << v;  // default 6 significant digits keeps names compact
  return os.str();
}

uint64_t fnv1a_64(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string checksum_hex(const std::string& data) {
  char buf[17] = {};
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a_64(data)));
  return std::string(buf);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

nlohmann::ordered_json noise_json(const NoiseSpec& noise) {
  nlohmann::ordered_json j;
  switch (noise.kind) {
    case NoiseSpec::Kind::Beta: j["kind"] = "beta"; break;
    case NoiseSpec::Kind::Snr: j["kind"] = "snr"; break;
    case NoiseSpec::Kind::Noiseless: j["kind"] = "noiseless"; break;
  }
  j["value"] = noise.value;
  return j;
}

NoiseSpec noise_from_json(const nlohmann::json& j) {
  if (j.is_number()) return NoiseSpec::beta(j.get<double>());
  if (!j.is_object() || !j.contains("kind")) {
    throw InputError("noise entries must be numbers (beta) or {kind, value} objects");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "noiseless") return NoiseSpec::noiseless();
  const double value = j.at("value").get<double>();
  if (kind == "beta") return NoiseSpec::beta(value);
  if (kind == "snr") return NoiseSpec::snr_db(value);
  throw InputError("unknown noise kind '" + kind + "'");
}

template <typename T, typename Fn>
std::vector<T> scalar_or_list(const nlohmann::json& j, Fn&& convert) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(convert(item));
  } else {
    out.push_back(convert(j));
  }
  return out;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (m < 1 || n < 1) throw InputError("experiment dims must be positive");
  if (dictionary_kind == DictionaryKind::Identity && m != n) {
    throw InputError("identity dictionary requires m == n");
  }
  if (dictionary_kind == DictionaryKind::PartialDct && m > n) {
    throw InputError("partial dct requires m <= n");
  }
  if (dictionary_kind == DictionaryKind::CustomFile && dictionary_file.empty()) {
    throw InputError("custom_file dictionary requires dictionary_file");
  }
  if (sparsity_percents.empty()) throw InputError("at least one sparsity level is required");
  for (double s : sparsity_percents) {
    if (!(s > 0.0) || s > 100.0) throw InputError("sparsity percent must lie in (0, 100]");
  }
  if (noise_specs.empty()) throw InputError("at least one noise spec is required");
  if (algorithms.empty()) throw InputError("at least one algorithm is required");
  if (taus.empty()) throw InputError("at least one tau is required");
  if (repetitions < 1) throw InputError("repetitions must be at least 1");
  if (!(gamma0 > 0.0)) throw InputError("gamma0 must be positive");
  AlgorithmConfig probe;
  probe.tau = taus.front();
  probe.epsilon = epsilon;
  probe.eta0 = eta0;
  probe.rel_tol = rel_tol;
  probe.prune_tol = prune_tol;
  probe.max_iters = max_iters;
  probe.validate();
  for (double t : taus) {
    if (!(t >= 0.0)) throw InputError("tau must be non-negative");
  }
}

std::string ExperimentSpec::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["dictionary"] = sbl::to_string(dictionary_kind);
  if (dictionary_kind == DictionaryKind::CustomFile) j["dictionary_file"] = dictionary_file;
  j["m"] = m;
  j["n"] = n;
  j["sparsity"] = sparsity_percents;
  nlohmann::ordered_json noises = nlohmann::ordered_json::array();
  for (const NoiseSpec& ns : noise_specs) noises.push_back(noise_json(ns));
  j["noise"] = noises;
  nlohmann::ordered_json algs = nlohmann::ordered_json::array();
  for (Algorithm a : algorithms) algs.push_back(sbl::to_string(a));
  j["algorithms"] = algs;
  j["tau"] = taus;
  j["epsilon"] = epsilon;
  j["eta0"] = eta0;
  j["rel_tol"] = rel_tol;
  j["prune_tol"] = prune_tol;
  j["max_iters"] = max_iters;
  j["seed"] = seed;
  j["repetitions"] = repetitions;
  j["scale_signal_to_unit"] = scale_signal_to_unit;
  j["gamma0"] = gamma0;
  return j.dump(2) + "\n";
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment spec parse failure: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    spec.dictionary_kind = parse_dictionary_kind(j.at("dictionary").get<std::string>());
    if (j.contains("dictionary_file")) {
      spec.dictionary_file = j.at("dictionary_file").get<std::string>();
    }
    spec.m = j.at("m").get<Eigen::Index>();
    spec.n = j.at("n").get<Eigen::Index>();
    spec.sparsity_percents =
        scalar_or_list<double>(j.at("sparsity"), [](const nlohmann::json& v) {
          return v.get<double>();
        });
    spec.noise_specs = scalar_or_list<NoiseSpec>(j.at("noise"), noise_from_json);
    spec.algorithms =
        scalar_or_list<Algorithm>(j.at("algorithms"), [](const nlohmann::json& v) {
          return parse_algorithm(v.get<std::string>());
        });
    if (j.contains("tau")) {
      spec.taus = scalar_or_list<double>(j.at("tau"), [](const nlohmann::json& v) {
        return v.get<double>();
      });
    }
    if (j.contains("epsilon")) spec.epsilon = j.at("epsilon").get<double>();
    if (j.contains("eta0")) spec.eta0 = j.at("eta0").get<double>();
    if (j.contains("rel_tol")) spec.rel_tol = j.at("rel_tol").get<double>();
    if (j.contains("prune_tol")) spec.prune_tol = j.at("prune_tol").get<double>();
    if (j.contains("max_iters")) spec.max_iters = j.at("max_iters").get<int>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();
    if (j.contains("repetitions")) spec.repetitions = j.at("repetitions").get<int>();
    if (j.contains("scale_signal_to_unit")) {
      spec.scale_signal_to_unit = j.at("scale_signal_to_unit").get<bool>();
    }
    if (j.contains("gamma0")) spec.gamma0 = j.at("gamma0").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment spec field error: ") + e.what());
  }
  spec.validate();
  return spec;
}

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
  return from_json(read_file(path));
}

std::vector<std::string> preset_names() {
  return {"denoise-grid", "dct-grid", "dct-tau-sweep", "eeg-analog", "sar-analog"};
}

ExperimentSpec preset_spec(const std::string& name, uint64_t seed) {
  ExperimentSpec spec;
  spec.name = name;
  spec.seed = seed;
  spec.algorithms = {Algorithm::Em, Algorithm::Mk, Algorithm::Cb, Algorithm::Amq};
  if (name == "denoise-grid") {
    spec.dictionary_kind = DictionaryKind::Identity;
    spec.m = spec.n = 512;
    spec.sparsity_percents = {10.0, 80.0};
    spec.noise_specs = {NoiseSpec::beta(0.1), NoiseSpec::beta(1.0), NoiseSpec::beta(10.0)};
    spec.max_iters = 2000;
  } else if (name == "dct-grid") {
    spec.dictionary_kind = DictionaryKind::PartialDct;
    spec.m = 256;
    spec.n = 512;
    spec.sparsity_percents = {10.0, 80.0};
    spec.noise_specs = {NoiseSpec::beta(0.1), NoiseSpec::beta(1.0), NoiseSpec::beta(10.0)};
    spec.max_iters = 1000;
  } else if (name == "dct-tau-sweep") {
    spec.dictionary_kind = DictionaryKind::PartialDct;
    spec.m = 256;
    spec.n = 512;
    spec.sparsity_percents = {10.0, 80.0};
    spec.noise_specs = {NoiseSpec::beta(0.1), NoiseSpec::beta(1.0), NoiseSpec::beta(10.0)};
    spec.algorithms = {Algorithm::Amq};
    spec.taus = {1e-10, 1e-5, 1e-2, 1e-1};
    spec.max_iters = 1000;
  } else if (name == "eeg-analog") {
    spec.dictionary_kind = DictionaryKind::Gaussian;
    spec.m = 122;
    spec.n = 16384;
    spec.sparsity_percents = {3.60107421875};  // 590 of 16384 entries
    spec.noise_specs = {NoiseSpec::snr_db(20.0)};
    spec.scale_signal_to_unit = true;
    spec.max_iters = 600;
  } else if (name == "sar-analog") {
    spec.dictionary_kind = DictionaryKind::PartialDct;
    spec.m = 4096;
    spec.n = 16384;
    spec.sparsity_percents = {10.0};
    spec.noise_specs = {NoiseSpec::snr_db(20.0)};
    spec.max_iters = 300;
  } else {
    throw InputError("unknown preset '" + name +
                     "' (expected denoise-grid, dct-grid, dct-tau-sweep, eeg-analog, "
                     "or sar-analog)");
  }
  return spec;
}

std::string cell_name(Algorithm alg, DictionaryKind kind, double sparsity_percent,
                      const NoiseSpec& noise, double tau, int rep) {
  std::ostringstream os;
  os << to_string(alg) << '_' << to_string(kind) << "_s" << short_number(sparsity_percent) << '_'
     << noise.label() << "_tau" << short_number(tau) << "_rep" << rep;
  return os.str();
}

namespace {

struct CellPlan {
  size_t data_index;  // (sparsity, noise) pair index
  Algorithm alg;
  double sparsity;
  NoiseSpec noise;
  double tau;
  int rep;
};

struct CellData {
  std::unique_ptr<ProblemInstance> problem;
  Vector gamma_star;  // identity with finite noise only
  bool has_reference = false;
};

CellResult run_cell(const ExperimentSpec& spec, const CellPlan& plan, const CellData& data) {
  CellResult out;
  out.name = cell_name(plan.alg, spec.dictionary_kind, plan.sparsity, plan.noise, plan.tau,
                       plan.rep);
  out.algorithm = plan.alg;
  out.sparsity_percent = plan.sparsity;
  out.noise = plan.noise;
  out.tau = plan.tau;
  out.rep = plan.rep;
  out.has_error_curve = data.has_reference;

  AlgorithmConfig config;
  config.tau = plan.tau;
  config.epsilon = spec.epsilon;
  config.eta0 = spec.eta0;
  config.rel_tol = spec.rel_tol;
  config.prune_tol = spec.prune_tol;
  config.max_iters = spec.max_iters;

  try {
    HyperparamVector gamma0(Vector::Constant(spec.n, spec.gamma0));
    IterationCallback callback = nullptr;
    if (data.has_reference) {
      callback = [&out, &data](const IterationRecord&, const HyperparamVector& gamma) {
        out.gamma_error.push_back((gamma.values() - data.gamma_star).norm());
      };
    }
    RunResult result = run(plan.alg, *data.problem, gamma0, config, callback);
    out.trace = std::move(result.trace);
  } catch (const std::exception& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace

std::vector<CellResult> run_matrix(const ExperimentSpec& spec, int jobs, ProgressFn progress) {
  spec.validate();
  if (jobs < 1) throw InputError("jobs must be at least 1");

  Matrix dictionary;
  if (spec.dictionary_kind == DictionaryKind::CustomFile) {
    dictionary = read_matrix(spec.dictionary_file);
    if (dictionary.rows() != spec.m || dictionary.cols() != spec.n) {
      std::ostringstream os;
      os << "dictionary file is " << dictionary.rows() << "x" << dictionary.cols()
         << " but the spec declares " << spec.m << "x" << spec.n;
      throw InputError(os.str());
    }
  } else {
    dictionary = gen_dictionary(spec.dictionary_kind, spec.m, spec.n, spec.seed);
  }

  // Cells sharing a (sparsity, noise) pair run on one generated data set.
  std::vector<CellData> data;
  data.reserve(spec.sparsity_percents.size() * spec.noise_specs.size());
  for (double s : spec.sparsity_percents) {
    Vector x = gen_sparse_signal(spec.n, s, spec.seed);
    if (spec.scale_signal_to_unit) {
      const double peak = x.cwiseAbs().maxCoeff();
      if (peak > 0.0) x /= peak;
    }
    for (const NoiseSpec& noise : spec.noise_specs) {
      auto [y, beta_eff] = gen_observation(dictionary, x, noise, spec.seed);
      CellData cell;
      if (!std::isfinite(beta_eff)) {
        throw InputError("noiseless runs have no finite precision; use a beta or snr spec");
      }
      cell.problem = std::make_unique<ProblemInstance>(dictionary, y, beta_eff);
      if (spec.dictionary_kind == DictionaryKind::Identity) {
        cell.gamma_star = denoising_reference(y, beta_eff);
        cell.has_reference = true;
      }
      data.push_back(std::move(cell));
    }
  }

  std::vector<CellPlan> plans;
  for (size_t si = 0; si < spec.sparsity_percents.size(); ++si) {
    for (size_t ni = 0; ni < spec.noise_specs.size(); ++ni) {
      for (Algorithm alg : spec.algorithms) {
        for (double tau : spec.taus) {
          for (int rep = 0; rep < spec.repetitions; ++rep) {
            plans.push_back({si * spec.noise_specs.size() + ni, alg,
                             spec.sparsity_percents[si], spec.noise_specs[ni], tau, rep});
          }
        }
      }
    }
  }

  std::vector<CellResult> results(plans.size());
  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= plans.size()) break;
      results[i] = run_cell(spec, plans[i], data[plans[i].data_index]);
      const size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(results[i], finished, plans.size());
      }
    }
  };

  const int thread_count = std::min<int>(jobs, static_cast<int>(plans.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

namespace {

std::string cell_csv(const CellResult& cell) {
  std::ostringstream os;
  os << "iter,objective,gamma_rel_change,active_count,elapsed_ms";
  if (cell.has_error_curve) os << ",gamma_error";
  os << '\n';
  for (size_t k = 0; k < cell.trace.records.size(); ++k) {
    const IterationRecord& r = cell.trace.records[k];
    os << r.iter << ',' << format_double(r.objective) << ','
       << format_double(r.gamma_rel_change) << ',' << r.active_count << ",0";
    if (cell.has_error_curve) {
      os << ',' << (k < cell.gamma_error.size() ? format_double(cell.gamma_error[k]) : "");
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

void write_results(const std::string& out_dir, const ExperimentSpec& spec,
                   const std::vector<CellResult>& results) {
  fs::create_directories(out_dir);

  nlohmann::ordered_json manifest;
  manifest["experiment"] = nlohmann::ordered_json::parse(spec.to_json());
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();

  for (const CellResult& cell : results) {
    const std::string file = cell.name + ".csv";
    nlohmann::ordered_json entry;
    entry["file"] = file;
    entry["algorithm"] = to_string(cell.algorithm);
    entry["sparsity"] = cell.sparsity_percent;
    entry["noise"] = cell.noise.label();
    entry["tau"] = cell.tau;
    entry["rep"] = cell.rep;
    entry["has_error_curve"] = cell.has_error_curve;
    if (!cell.failure.empty()) {
      entry["status"] = "failed";
      entry["failure"] = cell.failure;
    } else {
      entry["status"] = to_string(cell.trace.status);
      entry["iterations"] = cell.trace.iterations();
      entry["final_objective"] = cell.trace.final_objective();
      const std::string csv = cell_csv(cell);
      std::ofstream os(fs::path(out_dir) / file, std::ios::binary);
      if (!os) throw InputError("cannot write cell file '" + file + "'");
      os << csv;
      entry["checksum"] = checksum_hex(csv);
    }
    cells.push_back(entry);
  }
  manifest["cells"] = cells;

  std::ofstream os(fs::path(out_dir) / "manifest.json", std::ios::binary);
  if (!os) throw InputError("cannot write manifest.json");
  os << manifest.dump(2) << '\n';
}

namespace {

// Column extracted from a cell CSV written by write_results.
std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(is, header)) throw InputError("'" + path + "' is empty");

  int target = -1;
  {
    std::stringstream hs(header);
    std::string name;
    for (int idx = 0; std::getline(hs, name, ','); ++idx) {
      if (name == column) {
        target = idx;
        break;
      }
    }
  }
  if (target < 0) throw InputError("'" + path + "' has no column '" + column + "'");

  std::vector<double> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string field;
    for (int idx = 0; std::getline(ls, field, ','); ++idx) {
      if (idx != target) continue;
      if (field.empty() || field == "nan") {
        out.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        double v = 0.0;
        auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc()) {
          throw InputError("'" + path + "' holds an unparsable value '" + field + "'");
        }
        out.push_back(v);
      }
      break;
    }
  }
  return out;
}

struct PanelSeries {
  std::string label;
  std::vector<double> values;  // NaN marks a gap
  bool present = false;
};

}  // namespace

int emit_plot_data(const std::string& results_dir, const std::string& out_dir,
                   const std::string& panel_filter) {
  const fs::path manifest_path = fs::path(results_dir) / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw InputError("'" + results_dir + "' holds no manifest.json; not a results directory");
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("manifest parse failure: ") + e.what());
  }

  const auto& exp = manifest.at("experiment");
  const bool identity = exp.at("dictionary").get<std::string>() == "identity";
  const size_t tau_count = exp.at("tau").size();
  const int repetitions = exp.at("repetitions").get<int>();

  // Panels keyed by (sparsity, noise) in first-seen manifest order.
  std::vector<std::pair<std::string, std::string>> panel_keys;
  std::map<std::pair<std::string, std::string>, std::vector<PanelSeries>> panels;
  int skipped = 0;

  for (const auto& cell : manifest.at("cells")) {
    const std::string noise = cell.at("noise").get<std::string>();
    const std::string s_label = "s" + short_number(cell.at("sparsity").get<double>());
    const auto key = std::make_pair(s_label, noise);
    if (panels.find(key) == panels.end()) {
      panels[key] = {};
      panel_keys.push_back(key);
    }

    std::ostringstream label;
    label << cell.at("algorithm").get<std::string>();
    if (tau_count > 1) label << "_tau" << short_number(cell.at("tau").get<double>());
    if (repetitions > 1) label << "_rep" << cell.at("rep").get<int>();

    PanelSeries series;
    series.label = label.str();
    const std::string status = cell.at("status").get<std::string>();
    const fs::path file = fs::path(results_dir) / cell.at("file").get<std::string>();
    if (status == "failed" || !fs::exists(file)) {
      std::fprintf(stderr, "warning: cell %s is %s; leaving a gap\n",
                   cell.at("file").get<std::string>().c_str(),
                   status == "failed" ? "failed" : "missing");
      ++skipped;
    } else {
      const bool use_error = identity && cell.at("has_error_curve").get<bool>();
      series.values = read_csv_column(file.string(), use_error ? "gamma_error" : "objective");
      if (use_error) {
        for (double& v : series.values) {
          v = (std::isfinite(v) && v > 0.0) ? std::log10(v)
                                            : std::numeric_limits<double>::quiet_NaN();
        }
      }
      series.present = true;
    }
    panels[key].push_back(std::move(series));
  }

  fs::create_directories(out_dir);
  bool matched = panel_filter.empty();
  for (const auto& key : panel_keys) {
    if (!panel_filter.empty() && key.first + "_" + key.second != panel_filter) continue;
    matched = true;
    const std::vector<PanelSeries>& series = panels[key];
    size_t rows = 0;
    for (const PanelSeries& s : series) rows = std::max(rows, s.values.size());

    std::ofstream os(fs::path(out_dir) / ("panel_" + key.first + "_" + key.second + ".csv"),
                     std::ios::binary);
    if (!os) throw InputError("cannot write panel file for " + key.first + "_" + key.second);
    os << "iter";
    for (const PanelSeries& s : series) os << ',' << s.label;
    os << '\n';
    for (size_t r = 0; r < rows; ++r) {
      os << r;
      for (const PanelSeries& s : series) {
        os << ',';
        if (r < s.values.size() && std::isfinite(s.values[r])) os << format_double(s.values[r]);
      }
      os << '\n';
    }
  }
  if (!matched) throw InputError("no panel matches '" + panel_filter + "'");
  return skipped;
}

}  // namespace sbl
