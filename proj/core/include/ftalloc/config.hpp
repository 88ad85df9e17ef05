#pragma once

#include <cstdint>

namespace ftalloc {

// Solver hyperparameters. The first four defaults are the published
// experimental settings; the remaining ones are implementation choices.
struct GameConfig {
  double epsilon_total = 0.1;
  double eps_min = 0.005;
  double weight_w = 0.5;
  int restarts_K = 32;
  int max_sweeps_Tmax = 100;
  double tol_delta = 1e-6;
  std::uint64_t rng_seed = 0;

  // Best-response line search.
  double brent_xtol = 1e-6;
  int brent_max_eval = 100;
  // Evenly spaced samples taken across the deviation interval to pick the
  // cell Brent refines; 0 runs Brent over the whole interval.
  int bracket_scan_points = 64;
  // Measure the per-sweep change relative to the previous cost.
  bool relative_delta = false;

  // Throws Error(kInvalidConfig) naming the first offending field.
  void validate() const;
};

}  // namespace ftalloc
