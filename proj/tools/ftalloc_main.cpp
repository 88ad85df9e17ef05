// ftalloc: error-budget allocation over a corpus of circuit profiles.

#include <chrono>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ftalloc/error.hpp"
#include "ftalloc/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distribute a fault-tolerant error budget by iterated best response"};
  app.set_version_flag("--version", std::string(ftalloc::tool_version()));

  std::string corpus;
  std::string profile;
  std::string out_dir;
  std::string oracle_choice = "synthetic";
  double grid_check = 0.0;
  double oracle_timeout_s = 60.0;
  unsigned jobs = 1;
  ftalloc::GameConfig cfg;

  auto* corpus_opt = app.add_option("--corpus", corpus, "Directory of *.json circuit profiles");
  auto* profile_opt = app.add_option("--profile", profile, "Single circuit profile file");
  corpus_opt->excludes(profile_opt);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--budget", cfg.epsilon_total, "Total error budget")->capture_default_str();
  app.add_option("--weight", cfg.weight_w, "Cost weight w in Q^w R^(1-w)")->capture_default_str();
  app.add_option("--min-alloc", cfg.eps_min, "Minimum allocation fraction")->capture_default_str();
  app.add_option("--tol", cfg.tol_delta, "Per-sweep stopping tolerance")->capture_default_str();
  app.add_option("--restarts", cfg.restarts_K, "Random restarts")->capture_default_str();
  app.add_option("--max-sweeps", cfg.max_sweeps_Tmax, "Sweeps per restart")->capture_default_str();
  app.add_option("--seed", cfg.rng_seed, "RNG seed")->capture_default_str();
  app.add_option("--oracle", oracle_choice, "synthetic | exec:<command>")->capture_default_str();
  auto* grid_opt = app.add_option("--grid-check", grid_check,
                                  "Also run a brute-force grid scan at this resolution");
  app.add_option("--scan-points", cfg.bracket_scan_points,
                 "Samples per best response before Brent refinement (0 = Brent only)")
      ->capture_default_str();
  app.add_flag("--relative-delta", cfg.relative_delta,
               "Stop on relative rather than absolute cost change");
  app.add_option("--oracle-timeout", oracle_timeout_s, "External oracle timeout in seconds")
      ->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads (synthetic oracle only)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (corpus.empty() && profile.empty()) {
    std::cerr << "error: one of --corpus or --profile is required\n";
    return 2;
  }

  try {
    cfg.validate();
    ftalloc::HarnessOptions options;
    options.jobs = jobs;
    if (grid_opt->count() > 0) options.grid_check = grid_check;
    auto oracle = ftalloc::make_oracle(
        oracle_choice,
        std::chrono::milliseconds(static_cast<long long>(oracle_timeout_s * 1000.0)));

    if (!profile.empty()) {
      const std::string report = ftalloc::run_single(profile, cfg, *oracle, options);
      std::cout << report;
      return 0;
    }

    if (out_dir.empty()) out_dir = "ftalloc-out";
    const auto run = ftalloc::run_corpus(corpus, cfg, *oracle, out_dir, options);
    for (const auto& d : run.diagnostics) std::cerr << d << "\n";
    const auto& s = run.summary;
    std::cout << "circuits " << s.circuit_count << "  converged " << s.converged_count
              << "  mean " << s.mean_pct << "%  median " << s.median_pct << "%  min "
              << s.min_pct << "%  max " << s.max_pct << "%\n"
              << "reports written to " << out_dir << "\n";
    return run.exit_code;
  } catch (const ftalloc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!e.detail().empty()) std::cerr << "  raw: " << e.detail() << "\n";
    return e.code() == ftalloc::ErrorCode::kUsage ? 2 : 1;
  }
}
