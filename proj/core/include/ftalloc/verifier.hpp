#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "ftalloc/config.hpp"
#include "ftalloc/cost_model.hpp"
#include "ftalloc/simplex.hpp"
#include "ftalloc/solver.hpp"

namespace ftalloc {

struct GridResult {
  Allocation allocation;
  double cost;
  std::int64_t points;  // feasible grid points evaluated
};

// Exhaustive scan of {(a h, b h, 1 - a h - b h)} restricted to the feasible
// set. Ties go to the lexicographically smallest (s_L, s_T). The result does
// not depend on `threads`.
GridResult grid_minimize(ResourceOracle& oracle, const CircuitProfile& profile,
                         const GameConfig& cfg, double resolution,
                         unsigned threads = 1);

struct EquilibriumCertificate {
  Allocation allocation;
  // Largest cost reduction found by any sampled unilateral deviation.
  std::array<double, 3> improvement{};
  int samples_per_player = 0;
  double bound = 0.0;
  bool pass = false;
};

EquilibriumCertificate certify_nash(ResourceOracle& oracle,
                                    const CircuitProfile& profile,
                                    const Allocation& s, const GameConfig& cfg,
                                    int samples_per_player, double bound);

struct OperatingPoint {
  Allocation allocation;
  ResourceEstimate estimate;
  double cost;
  double volume;
};

struct ImprovementReport {
  std::string circuit;
  OperatingPoint uniform;
  OperatingPoint equilibrium;
  double improvement_pct;
};

// 100 (1 - V_e / V_u).
double improvement_percent(double volume_uniform, double volume_equilibrium);

// Space-time volume at the uniform allocation versus the solver's s_star.
ImprovementReport improvement(ResourceOracle& oracle,
                              const CircuitProfile& profile,
                              const GameConfig& cfg, const SolveResult& result);

}  // namespace ftalloc
