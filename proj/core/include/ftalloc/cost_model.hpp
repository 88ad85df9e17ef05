#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ftalloc/config.hpp"
#include "ftalloc/simplex.hpp"

namespace ftalloc {

// Abstract workload descriptor consumed by the resource oracles.
struct CircuitProfile {
  std::string name;
  std::int64_t n_qubits = 1;
  std::int64_t depth = 1;
  std::int64_t t_count = 0;
  std::int64_t rotation_count = 0;
  double p_phys = 1e-3;
  double p_threshold = 1e-2;
  double cycle_time_us = 1.0;

  void validate() const;
};

// Parses one profile object. Missing required fields, wrong types and
// unknown keys all throw Error(kInvalidProfile).
CircuitProfile parse_profile(const std::string& json_text);
CircuitProfile load_profile(const std::filesystem::path& path);
std::string dump_profile(const CircuitProfile& profile);

struct ResourceEstimate {
  double physical_qubits = 1.0;
  double runtime_seconds = 1.0;
};

struct BudgetPartition {
  double eps_logical;
  double eps_tstates;
  double eps_rotations;
};

// Constants of the surface-code surrogate.
struct SurrogateParams {
  double prefactor_A = 0.1;
  double rotation_c0 = 1.0;
  double rotation_c1 = 3.0;
  double distill_coeff = 35.0;   // 15-to-1 output error (c p)^(2^l) / c
  double factory_tiles = 15.0;   // logical tiles per distillation level
  int max_distance = 99;
  int max_levels = 4;
};

// Intermediate quantities of one surrogate evaluation.
struct SurrogateBreakdown {
  BudgetPartition budget;
  int distance = 0;
  int levels = 0;
  std::int64_t total_t = 0;
  double patch_qubits = 0.0;
  double factory_qubits = 0.0;
  ResourceEstimate estimate;
};

BudgetPartition partition(const Allocation& s, double epsilon_total);

// Smallest odd d >= 3 with A (p/p_th)^((d+1)/2) <= target.
int code_distance(double per_op_target, double p_phys, double p_threshold,
                  const SurrogateParams& params = {});

// T gates per synthesized rotation: ceil(c0 + c1 log2(1/target)).
std::int64_t rotation_t_cost(double per_rotation_target,
                             const SurrogateParams& params = {});

// Smallest l >= 1 with (c p)^(2^l) / c <= target.
int distillation_levels(double per_t_target, double p_phys,
                        const SurrogateParams& params = {});

SurrogateBreakdown surrogate_breakdown(const Allocation& s,
                                       const CircuitProfile& profile,
                                       const GameConfig& cfg,
                                       const SurrogateParams& params = {});

inline ResourceEstimate estimate(const Allocation& s,
                                 const CircuitProfile& profile,
                                 const GameConfig& cfg,
                                 const SurrogateParams& params = {}) {
  return surrogate_breakdown(s, profile, cfg, params).estimate;
}

// Q^w R^(1-w).
double cost(const ResourceEstimate& est, double w);

// Q R.
double space_time_volume(const ResourceEstimate& est);

// Maps allocations to resource estimates. evaluate() returns nullopt for
// points the estimator rejects as infeasible (e.g. a code distance overflow);
// transport or protocol failures are thrown as ftalloc::Error.
class ResourceOracle {
 public:
  virtual ~ResourceOracle() = default;

  virtual std::optional<ResourceEstimate> evaluate(
      const Allocation& s, const CircuitProfile& profile,
      const GameConfig& cfg) = 0;

  // Scalarized objective; +infinity at infeasible points.
  virtual double evaluate_cost(const Allocation& s,
                               const CircuitProfile& profile,
                               const GameConfig& cfg);

  // True when evaluate() may be called concurrently.
  virtual bool reentrant() const { return false; }

  virtual std::string describe() const = 0;
};

// The in-repo surface-code surrogate. Pure, hence reentrant.
class SyntheticOracle final : public ResourceOracle {
 public:
  explicit SyntheticOracle(SurrogateParams params = {}) : params_(params) {}

  std::optional<ResourceEstimate> evaluate(const Allocation& s,
                                           const CircuitProfile& profile,
                                           const GameConfig& cfg) override;
  bool reentrant() const override { return true; }
  std::string describe() const override { return "synthetic"; }

  const SurrogateParams& params() const noexcept { return params_; }

 private:
  SurrogateParams params_;
};

}  // namespace ftalloc
