// Command-line front end.
//
//   sbl solve --dict F.csv --obs y.csv --beta 1 --alg amq --out results/
//   sbl denoise1d --y2 4 --b 1 --alg em --iters 100
//   sbl rates --r-list 0.25,0.5,2,4,20 --b 1 --iters 2000
//   sbl experiment --preset denoise-grid --out runs/denoise
//   sbl emit-plot-data --results runs/denoise --out plots/
//
// Exit codes: 0 success, 1 input error, 2 numerical failure or divergence.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbl/denoise1d.hpp"
#include "sbl/experiment.hpp"
#include "sbl/matio.hpp"
#include "sbl/report.hpp"

namespace {

namespace fs = std::filesystem;

std::string default_out_dir() {
  const char* env = std::getenv("SBL_OUT_DIR");
  return env && *env ? env : ".";
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw sbl::InputError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw sbl::InputError(std::string(what) + " list is empty");
  return out;
}

struct SolveOptions {
  std::string dict_path;
  std::string obs_path;
  std::string gamma0_path;
  double beta = 1.0;
  std::string alg = "amq";
  sbl::AlgorithmConfig config;
  std::string out_dir = default_out_dir();
  std::string format = "csv";
  bool timings = false;
};

int run_solve(const SolveOptions& opt) {
  sbl::Matrix f = sbl::read_matrix(opt.dict_path);
  sbl::Vector y = sbl::read_vector(opt.obs_path);
  sbl::ProblemInstance problem(f, y, opt.beta);
  sbl::Vector g0 = opt.gamma0_path.empty() ? sbl::Vector::Ones(f.cols())
                                           : sbl::read_vector(opt.gamma0_path);
  if (g0.size() != f.cols()) {
    std::ostringstream os;
    os << "gamma0 file '" << opt.gamma0_path << "' holds " << g0.size() << " entries but '"
       << opt.dict_path << "' has " << f.cols() << " columns";
    throw sbl::InputError(os.str());
  }
  sbl::HyperparamVector gamma0(g0);
  opt.config.validate();

  sbl::Algorithm alg = sbl::parse_algorithm(opt.alg);
  sbl::RunResult result = sbl::run(alg, problem, gamma0, opt.config);

  fs::create_directories(opt.out_dir);
  sbl::write_trace_csv((fs::path(opt.out_dir) / "trace.csv").string(), result.trace,
                       opt.timings);
  sbl::write_summary_json((fs::path(opt.out_dir) / "summary.json").string(), result, alg,
                          opt.config);

  const std::string status = sbl::to_string(result.trace.status);
  if (opt.format == "json") {
    std::cout << "{\"status\":\"" << status << "\",\"iterations\":" << result.trace.iterations()
              << ",\"final_objective\":" << sbl::format_double(result.trace.final_objective())
              << ",\"active_count\":" << result.gamma.active_count() << "}\n";
  } else {
    std::cout << "status,iterations,final_objective,active_count\n"
              << status << ',' << result.trace.iterations() << ','
              << sbl::format_double(result.trace.final_objective()) << ','
              << result.gamma.active_count() << '\n';
  }
  const bool failed = result.trace.status == sbl::RunStatus::Diverged ||
                      result.trace.status == sbl::RunStatus::NumericalErrorAbort;
  if (failed && !result.trace.message.empty()) {
    std::cerr << "error: " << result.trace.message << '\n';
  }
  return failed ? 2 : 0;
}

struct RatesOptions {
  std::string r_list = "0.25,0.5,2,4,20";
  double b = 1.0;
  double gamma0 = 1.0;
  int iters = 2000;
  std::string format = "csv";
  std::string out_path;
};

int run_rates(const RatesOptions& opt) {
  const std::vector<double> rs = parse_double_list(opt.r_list, "r");
  for (double r : rs) {
    if (!(r > 0.0)) throw sbl::InputError("r values must be positive");
  }
  const std::vector<sbl::denoise::ScalarAlg> algs = {
      sbl::denoise::ScalarAlg::Em, sbl::denoise::ScalarAlg::Mk, sbl::denoise::ScalarAlg::Cb,
      sbl::denoise::ScalarAlg::Sq};

  std::ostringstream out;
  bool json = opt.format == "json";
  if (json) out << "[\n";
  else out << "alg,r,p_theory,zeta_theory,p_est,zeta_est,regime\n";

  bool first = true;
  for (sbl::denoise::ScalarAlg alg : algs) {
    for (double r : rs) {
      sbl::denoise::ScalarProblem problem(r * opt.b, opt.b);
      sbl::denoise::RateInfo info = sbl::denoise::theoretical_rate(alg, problem);
      std::optional<sbl::denoise::RateEstimate> est;
      try {
        est = sbl::denoise::empirical_rate(alg, problem, opt.gamma0, opt.iters);
      } catch (const sbl::denoise::WindowTooShortError&) {
        est.reset();
      }
      if (json) {
        if (!first) out << ",\n";
        out << "  {\"alg\":\"" << to_string(alg) << "\",\"r\":" << sbl::format_double(r)
            << ",\"p_theory\":" << sbl::format_double(info.order)
            << ",\"zeta_theory\":" << sbl::format_double(info.rate) << ",\"p_est\":"
            << (est ? sbl::format_double(est->p_est) : "null") << ",\"zeta_est\":"
            << (est ? sbl::format_double(est->zeta_est) : "null") << ",\"regime\":\""
            << to_string(info.regime) << "\"}";
        first = false;
      } else {
        out << to_string(alg) << ',' << sbl::format_double(r) << ','
            << sbl::format_double(info.order) << ',' << sbl::format_double(info.rate) << ','
            << (est ? sbl::format_double(est->p_est) : "") << ','
            << (est ? sbl::format_double(est->zeta_est) : "") << ',' << to_string(info.regime)
            << '\n';
      }
    }
  }
  if (json) out << "\n]\n";

  if (opt.out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream os(opt.out_path, std::ios::binary);
    if (!os) throw sbl::InputError("cannot open '" + opt.out_path + "' for writing");
    os << out.str();
  }
  return 0;
}

struct Denoise1dOptions {
  double y2 = 0.0;
  double b = 1.0;
  std::string alg = "em";
  double gamma0 = 1.0;
  int iters = 200;
  std::string out_path;
};

int run_denoise1d(const Denoise1dOptions& opt) {
  sbl::denoise::ScalarProblem problem(opt.y2, opt.b);
  sbl::denoise::ScalarAlg alg = sbl::denoise::parse_scalar_alg(opt.alg);
  const double star = sbl::denoise::closed_form_gamma(problem);
  sbl::denoise::RateInfo info = sbl::denoise::theoretical_rate(alg, problem);

  std::cout << "gamma_star=" << sbl::format_double(star) << '\n'
            << "p_theory=" << sbl::format_double(info.order)
            << " zeta_theory=" << sbl::format_double(info.rate)
            << " regime=" << to_string(info.regime) << '\n';
  try {
    sbl::denoise::RateEstimate est =
        sbl::denoise::empirical_rate(alg, problem, opt.gamma0, opt.iters);
    std::cout << "p_est=" << sbl::format_double(est.p_est)
              << " zeta_est=" << sbl::format_double(est.zeta_est) << " samples=" << est.samples
              << '\n';
  } catch (const sbl::denoise::WindowTooShortError& e) {
    std::cout << "p_est= zeta_est= window_too_short\n";
    std::cerr << "note: " << e.what() << '\n';
  }

  if (!opt.out_path.empty()) {
    std::vector<double> traj = sbl::denoise::trajectory(alg, opt.gamma0, problem, opt.iters);
    std::ofstream os(opt.out_path, std::ios::binary);
    if (!os) throw sbl::InputError("cannot open '" + opt.out_path + "' for writing");
    os << "k,gamma,error\n";
    for (size_t k = 0; k < traj.size(); ++k) {
      os << k << ',' << sbl::format_double(traj[k]) << ','
         << sbl::format_double(std::abs(traj[k] - star)) << '\n';
    }
  }
  return 0;
}

struct ExperimentOptions {
  std::string spec_path;
  std::string preset;
  std::string out_dir = default_out_dir();
  int jobs = 1;
  uint64_t seed = 1;
  bool seed_set = false;
  bool quiet = false;
};

int run_experiment(const ExperimentOptions& opt) {
  sbl::ExperimentSpec spec;
  if (!opt.spec_path.empty()) {
    spec = sbl::ExperimentSpec::from_file(opt.spec_path);
    if (opt.seed_set) spec.seed = opt.seed;
  } else if (!opt.preset.empty()) {
    spec = sbl::preset_spec(opt.preset, opt.seed);
  } else {
    throw sbl::InputError("experiment needs --spec FILE or --preset NAME");
  }

  sbl::ProgressFn progress = nullptr;
  if (!opt.quiet) {
    progress = [](const sbl::CellResult& cell, size_t done, size_t total) {
      std::ostringstream os;
      os << '[' << done << '/' << total << "] " << cell.name << ' ';
      if (!cell.failure.empty()) {
        os << "failed: " << cell.failure;
      } else {
        os << to_string(cell.trace.status) << ' ' << cell.trace.iterations() << " iters";
      }
      std::cerr << os.str() << '\n';
    };
  }

  std::vector<sbl::CellResult> results = sbl::run_matrix(spec, opt.jobs, progress);
  sbl::write_results(opt.out_dir, spec, results);
  if (!opt.quiet) {
    std::cerr << "wrote " << results.size() << " cells to " << opt.out_dir << '\n';
  }
  return 0;
}

struct PlotOptions {
  std::string results_dir;
  std::string out_dir = default_out_dir();
  std::string panel;
};

int run_plot(const PlotOptions& opt) {
  int skipped = sbl::emit_plot_data(opt.results_dir, opt.out_dir, opt.panel);
  if (skipped > 0) {
    std::cerr << "warning: " << skipped << " cell(s) left gaps\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Bayesian learning hyperparameter estimation toolkit"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "Run one solver on a problem from files");
  solve->add_option("--dict", solve_opt.dict_path, "Dictionary matrix file (.csv or binary)")
      ->required();
  solve->add_option("--obs", solve_opt.obs_path, "Observation vector file")->required();
  solve->add_option("--beta", solve_opt.beta, "Noise precision beta")->required();
  solve->add_option("--alg", solve_opt.alg, "Algorithm: em, mk, cb, amq")
      ->default_val("amq");
  solve->add_option("--tau", solve_opt.config.tau, "Smoothing constant tau");
  solve->add_option("--eps", solve_opt.config.epsilon, "Step-size decay epsilon");
  solve->add_option("--eta0", solve_opt.config.eta0, "Initial step size eta0");
  solve->add_option("--tol", solve_opt.config.rel_tol, "Relative gamma-change stop tolerance");
  solve->add_option("--prune-tol", solve_opt.config.prune_tol, "Pruning threshold");
  solve->add_option("--max-iters", solve_opt.config.max_iters, "Iteration cap");
  solve->add_option("--gamma0", solve_opt.gamma0_path, "Initial gamma vector file");
  solve->add_option("--out", solve_opt.out_dir, "Output directory for trace.csv, summary.json")
      ->envname("SBL_OUT_DIR");
  solve->add_option("--format", solve_opt.format, "Stdout format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  solve->add_flag("--timings", solve_opt.timings, "Write real wall times into trace.csv");
  uint64_t solve_seed_unused = 0;
  solve->add_option("--seed", solve_seed_unused,
                    "Accepted for interface uniformity; solve is deterministic");

  RatesOptions rates_opt;
  CLI::App* rates = app.add_subcommand("rates", "Theoretical vs measured 1D rates table");
  rates->add_option("--r-list", rates_opt.r_list, "Comma-separated y^2/b ratios");
  rates->add_option("--b", rates_opt.b, "Noise variance b");
  rates->add_option("--gamma0", rates_opt.gamma0, "Initial gamma");
  rates->add_option("--iters", rates_opt.iters, "Iteration budget per trajectory");
  rates->add_option("--format", rates_opt.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  rates->add_option("--out", rates_opt.out_path, "Write the table here instead of stdout");

  Denoise1dOptions den_opt;
  CLI::App* den = app.add_subcommand("denoise1d", "Scalar problem analyzer");
  den->add_option("--y2", den_opt.y2, "Squared observation y^2")->required();
  den->add_option("--b", den_opt.b, "Noise variance b")->required();
  den->add_option("--alg", den_opt.alg, "Algorithm: em, mk, cb, sq")->required();
  den->add_option("--gamma0", den_opt.gamma0, "Initial gamma");
  den->add_option("--iters", den_opt.iters, "Iteration budget");
  den->add_option("--out", den_opt.out_path, "Trajectory CSV path");

  ExperimentOptions exp_opt;
  CLI::App* exp = app.add_subcommand("experiment", "Run an experiment matrix");
  CLI::Option* spec_opt = exp->add_option("--spec", exp_opt.spec_path, "Experiment spec JSON");
  exp->add_option("--preset", exp_opt.preset,
                  "Built-in matrix: denoise-grid, dct-grid, dct-tau-sweep, eeg-analog, "
                  "sar-analog")
      ->excludes(spec_opt);
  exp->add_option("--out", exp_opt.out_dir, "Results directory")->envname("SBL_OUT_DIR");
  exp->add_option("--jobs", exp_opt.jobs, "Concurrent cells");
  exp->add_option("--seed", exp_opt.seed, "Data generation seed")
      ->each([&exp_opt](const std::string&) { exp_opt.seed_set = true; });
  exp->add_flag("--quiet", exp_opt.quiet, "Suppress progress lines");

  PlotOptions plot_opt;
  CLI::App* plot = app.add_subcommand("emit-plot-data", "Reshape results into panel CSVs");
  plot->add_option("--results", plot_opt.results_dir, "Directory written by experiment")
      ->required();
  plot->add_option("--out", plot_opt.out_dir, "Panel output directory")->envname("SBL_OUT_DIR");
  plot->add_option("--panel", plot_opt.panel, "Only emit the panel with this stem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(solve)) return run_solve(solve_opt);
    if (app.got_subcommand(rates)) return run_rates(rates_opt);
    if (app.got_subcommand(den)) return run_denoise1d(den_opt);
    if (app.got_subcommand(exp)) return run_experiment(exp_opt);
    if (app.got_subcommand(plot)) return run_plot(plot_opt);
  } catch (const sbl::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const sbl::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
