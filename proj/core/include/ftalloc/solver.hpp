#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftalloc/config.hpp"
#include "ftalloc/cost_model.hpp"
#include "ftalloc/error.hpp"
#include "ftalloc/simplex.hpp"

namespace ftalloc {

struct SweepRecord {
  int sweep = 0;  // 0 is the restart's starting point
  Allocation allocation;
  double cost = 0.0;
  double delta = 0.0;     // max per-player cost change during the sweep
  double movement = 0.0;  // max per-component allocation change; logged only
};

struct RestartFailure {
  ErrorCode code;
  std::string message;
};

struct RestartTrace {
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<SweepRecord> records;
  bool converged = false;
  std::int64_t evaluations = 0;
  std::optional<RestartFailure> failure;

  int sweeps() const noexcept {
    return records.empty() ? 0 : static_cast<int>(records.size()) - 1;
  }
};

struct SolveResult {
  Allocation s_star;
  double c_star = 0.0;
  double uniform_cost = 0.0;
  std::vector<RestartTrace> restarts;
  // Index of the restart that produced s_star; nullopt when the uniform
  // incumbent was never strictly beaten.
  std::optional<int> winning_restart;
  std::int64_t oracle_evaluations = 0;

  // Every restart that ran to completion reached the stopping tolerance.
  bool converged() const noexcept;
};

struct BestResponse {
  Allocation allocation;
  double cost;
  std::int64_t evaluations;
};

struct SweepResult {
  Allocation allocation;
  double cost;
  double delta;
  std::int64_t evaluations;
};

struct SolveOptions {
  // Restarts run concurrently only when the oracle reports reentrant().
  unsigned threads = 1;
};

/// Player i's best response to s: Brent's method over the feasible
/// deviation interval, keeping s itself unless a strictly cheaper point is
/// found. `current_cost`, when given, must equal the oracle cost at s.
BestResponse best_response(ResourceOracle& oracle, const CircuitProfile& profile,
                           const Allocation& s, PlayerId i,
                           const GameConfig& cfg,
                           std::optional<double> current_cost = std::nullopt);

// One cyclic pass L, T, R.
SweepResult sweep(ResourceOracle& oracle, const CircuitProfile& profile,
                  const Allocation& s, const GameConfig& cfg,
                  std::optional<double> current_cost = std::nullopt);

/// Multistart iterated best response. The incumbent starts at the uniform
/// allocation; each restart draws a Dirichlet(1,1,1) start and sweeps until
/// the per-sweep change drops below tol_delta or max_sweeps_Tmax is hit.
/// Restarts that fail on oracle errors are recorded and skipped; if none
/// completes, the first failure is rethrown.
SolveResult solve(ResourceOracle& oracle, const CircuitProfile& profile,
                  const GameConfig& cfg, const SolveOptions& options = {});

}  // namespace ftalloc
