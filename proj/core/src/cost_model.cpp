#include "ftalloc/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ftalloc/error.hpp"
#include "json.hpp"

namespace ftalloc {

namespace {

using nlohmann::json;

// Threshold comparisons accept targets that match a level boundary up to
// round-off, so 0.1 * 0.1^9 <= 1e-10 holds as in exact arithmetic.
constexpr double kBoundarySlack = 1e-12;

// Integer-valued ceilings are taken after removing round-off noise.
constexpr double kCeilSlack = 1e-9;

void require_profile(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidProfile, what);
}

std::int64_t get_count(const json& j, const char* key) {
  require_profile(j.contains(key), std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  require_profile(v.is_number_integer(),
                  std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

double get_real(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  require_profile(v.is_number(),
                  std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

void CircuitProfile::validate() const {
  require_profile(!name.empty(), "name must be non-empty");
  require_profile(n_qubits >= 1, "n_qubits must be >= 1");
  require_profile(depth >= 1, "depth must be >= 1");
  require_profile(t_count >= 0 && rotation_count >= 0,
                  "gate counts must be nonnegative");
  require_profile(p_phys > 0.0 && p_threshold < 1.0 && p_phys < p_threshold,
                  "requires 0 < p_phys < p_threshold < 1");
  require_profile(cycle_time_us > 0.0 && std::isfinite(cycle_time_us),
                  "cycle_time_us must be positive");
}

CircuitProfile parse_profile(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidProfile, std::string("malformed JSON: ") + e.what());
  }
  require_profile(j.is_object(), "profile must be a JSON object");
  static const char* const kKnown[] = {"name",         "n_qubits",      "depth",
                                       "t_count",      "rotation_count", "p_phys",
                                       "p_threshold",  "cycle_time_us"};
  for (const auto& item : j.items()) {
    require_profile(std::find_if(std::begin(kKnown), std::end(kKnown),
                                 [&](const char* k) { return item.key() == k; }) !=
                        std::end(kKnown),
                    "unknown field '" + item.key() + "'");
  }
  require_profile(j.contains("name") && j.at("name").is_string(),
                  "field 'name' must be a string");

  CircuitProfile p;
  p.name = j.at("name").get<std::string>();
  p.n_qubits = get_count(j, "n_qubits");
  p.depth = get_count(j, "depth");
  p.t_count = get_count(j, "t_count");
  p.rotation_count = get_count(j, "rotation_count");
  p.p_phys = get_real(j, "p_phys", p.p_phys);
  p.p_threshold = get_real(j, "p_threshold", p.p_threshold);
  p.cycle_time_us = get_real(j, "cycle_time_us", p.cycle_time_us);
  p.validate();
  return p;
}

CircuitProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_profile(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.what());
  }
}

std::string dump_profile(const CircuitProfile& p) {
  json j = {{"name", p.name},
            {"n_qubits", p.n_qubits},
            {"depth", p.depth},
            {"t_count", p.t_count},
            {"rotation_count", p.rotation_count},
            {"p_phys", p.p_phys},
            {"p_threshold", p.p_threshold},
            {"cycle_time_us", p.cycle_time_us}};
  return j.dump();
}

BudgetPartition partition(const Allocation& s, double epsilon_total) {
  return {s[PlayerId::L] * epsilon_total, s[PlayerId::T] * epsilon_total,
          s[PlayerId::R] * epsilon_total};
}

int code_distance(double per_op_target, double p_phys, double p_threshold,
                  const SurrogateParams& params) {
  if (!(per_op_target > 0.0 && per_op_target < 1.0)) {
    throw Error(ErrorCode::kBounds, "per-operation target must lie in (0, 1)");
  }
  if (!(p_phys > 0.0 && p_phys < p_threshold)) {
    throw Error(ErrorCode::kBounds, "requires 0 < p_phys < p_threshold");
  }
  const double ratio = p_phys / p_threshold;
  const double target = per_op_target * (1.0 + kBoundarySlack);
  for (int d = 3; d <= params.max_distance; d += 2) {
    if (params.prefactor_A * std::pow(ratio, (d + 1) / 2.0) <= target) return d;
  }
  throw Error(ErrorCode::kDistanceOverflow,
              "required code distance exceeds " +
                  std::to_string(params.max_distance));
}

std::int64_t rotation_t_cost(double per_rotation_target,
                             const SurrogateParams& params) {
  if (!(per_rotation_target > 0.0 && per_rotation_target < 1.0)) {
    throw Error(ErrorCode::kBounds, "per-rotation target must lie in (0, 1)");
  }
  const double t = params.rotation_c0 +
                   params.rotation_c1 * std::log2(1.0 / per_rotation_target);
  return static_cast<std::int64_t>(std::ceil(t - kCeilSlack));
}

int distillation_levels(double per_t_target, double p_phys,
                        const SurrogateParams& params) {
  if (!(per_t_target > 0.0)) {
    throw Error(ErrorCode::kBounds, "per-T target must be positive");
  }
  const double c = params.distill_coeff;
  const double target = per_t_target * (1.0 + kBoundarySlack);
  for (int level = 1; level <= params.max_levels; ++level) {
    if (std::pow(c * p_phys, std::ldexp(1.0, level)) / c <= target) return level;
  }
  throw Error(ErrorCode::kDistillationOverflow,
              "distillation needs more than " + std::to_string(params.max_levels) +
                  " levels");
}

SurrogateBreakdown surrogate_breakdown(const Allocation& s,
                                       const CircuitProfile& profile,
                                       const GameConfig& cfg,
                                       const SurrogateParams& params) {
  profile.validate();
  SurrogateBreakdown out;
  out.budget = partition(s, cfg.epsilon_total);

  const std::int64_t rotations = profile.rotation_count;
  const std::int64_t per_rotation = rotation_t_cost(
      out.budget.eps_rotations / static_cast<double>(std::max<std::int64_t>(rotations, 1)),
      params);
  out.total_t = profile.t_count + rotations * per_rotation;

  const double ops = static_cast<double>(profile.n_qubits) *
                     static_cast<double>(profile.depth);
  out.distance = code_distance(out.budget.eps_logical / ops, profile.p_phys,
                               profile.p_threshold, params);
  const double d = out.distance;
  const double tile_qubits = 2.0 * d * d;
  out.patch_qubits = static_cast<double>(profile.n_qubits) * tile_qubits;

  if (profile.t_count + rotations > 0) {
    out.levels = distillation_levels(
        out.budget.eps_tstates /
            static_cast<double>(std::max<std::int64_t>(out.total_t, 1)),
        profile.p_phys, params);
    out.factory_qubits = out.levels * params.factory_tiles * tile_qubits;
  }

  const double cycle_seconds = profile.cycle_time_us * 1e-6;
  const double compute_cycles = static_cast<double>(profile.depth) * d;
  const double factory_cycles =
      static_cast<double>(out.total_t) * out.levels * d;
  out.estimate.physical_qubits = out.patch_qubits + out.factory_qubits;
  out.estimate.runtime_seconds =
      std::max(compute_cycles, factory_cycles) * cycle_seconds;
  return out;
}

double cost(const ResourceEstimate& est, double w) {
  return std::pow(est.physical_qubits, w) *
         std::pow(est.runtime_seconds, 1.0 - w);
}

double space_time_volume(const ResourceEstimate& est) {
  return est.physical_qubits * est.runtime_seconds;
}

double ResourceOracle::evaluate_cost(const Allocation& s,
                                     const CircuitProfile& profile,
                                     const GameConfig& cfg) {
  const auto est = evaluate(s, profile, cfg);
  return est ? cost(*est, cfg.weight_w)
             : std::numeric_limits<double>::infinity();
}

std::optional<ResourceEstimate> SyntheticOracle::evaluate(
    const Allocation& s, const CircuitProfile& profile, const GameConfig& cfg) {
  try {
    return ftalloc::estimate(s, profile, cfg, params_);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDistanceOverflow ||
        e.code() == ErrorCode::kDistillationOverflow) {
      return std::nullopt;
    }
    throw;
  }
}

}  // namespace ftalloc
