#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sbl/datagen.hpp"
#include "sbl/runner.hpp"

namespace sbl {

// One experiment matrix: every combination of sparsity level, noise spec,
// algorithm, tau, and repetition becomes a cell run on seed-determined data.
// Repetitions reuse the same data, so they certify determinism.
struct ExperimentSpec {
  std::string name = "custom";
  DictionaryKind dictionary_kind = DictionaryKind::Identity;
  std::string dictionary_file;  // custom_file only
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  std::vector<double> sparsity_percents;
  std::vector<NoiseSpec> noise_specs;
  std::vector<Algorithm> algorithms;
  std::vector<double> taus{1e-10};
  double epsilon = 0.02;
  double eta0 = 1.0;
  double rel_tol = 1e-3;
  double prune_tol = 1e-12;
  int max_iters = 10000;
  uint64_t seed = 1;
  int repetitions = 1;
  bool scale_signal_to_unit = false;
  double gamma0 = 1.0;

  void validate() const;
  std::string to_json() const;
  static ExperimentSpec from_json(const std::string& text);
  static ExperimentSpec from_file(const std::string& path);
};

// Built-in matrices: denoise-grid, dct-grid, dct-tau-sweep, eeg-analog,
// sar-analog (the last is documented as heavy and excluded from tests).
ExperimentSpec preset_spec(const std::string& name, uint64_t seed);
std::vector<std::string> preset_names();

struct CellResult {
  std::string name;
  Algorithm algorithm = Algorithm::Em;
  double sparsity_percent = 0.0;
  NoiseSpec noise;
  double tau = 0.0;
  int rep = 0;
  ConvergenceTrace trace;
  std::vector<double> gamma_error;  // identity dictionary only
  bool has_error_curve = false;
  std::string failure;  // non-empty when the cell aborted before producing a trace
};

// `em_identity_s10_beta0.1_tau1e-10_rep0` style stem (no extension).
std::string cell_name(Algorithm alg, DictionaryKind kind, double sparsity_percent,
                      const NoiseSpec& noise, double tau, int rep);

using ProgressFn = std::function<void(const CellResult&, size_t done, size_t total)>;

// Runs every cell, serially or on `jobs` threads; results always come back in
// spec enumeration order and cell failures never abort the matrix.
std::vector<CellResult> run_matrix(const ExperimentSpec& spec, int jobs = 1,
                                   ProgressFn progress = nullptr);

// One trace CSV per cell (identity cells gain a gamma_error column) plus
// manifest.json listing cells, statuses, and FNV-1a checksums. No wall times
// are written, so a rerun with the same spec is byte-identical.
void write_results(const std::string& out_dir, const ExperimentSpec& spec,
                   const std::vector<CellResult>& results);

// Reassembles per-panel plot tables from a results directory written by
// write_results: one CSV per (sparsity, noise) panel with one series column
// per algorithm (and tau, when several were swept). Identity panels carry
// log10 of the gamma error; others carry the objective. A non-empty
// panel_filter selects the single panel with that `s10_beta0.1` style stem.
// Returns the number of missing or failed cells that were skipped with a
// warning.
int emit_plot_data(const std::string& results_dir, const std::string& out_dir,
                   const std::string& panel_filter = "");

}  // namespace sbl
