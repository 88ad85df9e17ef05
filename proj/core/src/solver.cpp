#include "ftalloc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "ftalloc/scalar_min.hpp"

namespace ftalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CountingObjective {
 public:
  CountingObjective(ResourceOracle& oracle, const CircuitProfile& profile,
                    const GameConfig& cfg)
      : oracle_(oracle), profile_(profile), cfg_(cfg) {}

  double operator()(const Allocation& s) {
    ++evaluations;
    return oracle_.evaluate_cost(s, profile_, cfg_);
  }

  std::int64_t evaluations = 0;

 private:
  ResourceOracle& oracle_;
  const CircuitProfile& profile_;
  const GameConfig& cfg_;
};

double logit(double x) { return std::log(x / (1.0 - x)); }
double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double cost_change(double before, double after, bool relative) {
  if (before == after) return 0.0;  // also covers inf == inf
  const double diff = std::abs(after - before);
  if (!relative) return diff;
  return before != 0.0 && std::isfinite(before) ? diff / std::abs(before) : diff;
}

BestResponse best_response_impl(CountingObjective& objective, const Allocation& s,
                                PlayerId i, const GameConfig& cfg,
                                double current_cost) {
  const Interval iv = deviation_interval(s, i, cfg.eps_min);
  if (!(iv.hi > iv.lo)) return {s, current_cost, 0};

  const auto line = [&](double x) {
    try {
      return objective(deviate(s, i, x, cfg.eps_min));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kOpponentFloor || e.code() == ErrorCode::kBounds) {
        return kInf;
      }
      throw;
    }
  };
  double lo = iv.lo;
  double hi = iv.hi;
  double best_x = iv.lo;
  double best_f = kInf;
  std::int64_t evaluations = 0;
  if (const int n = cfg.bracket_scan_points; n >= 3) {
    // The objective is stepwise in the integer code distance and
    // distillation depth, so it is rarely unimodal over the whole interval.
    // Resource counts scale with log(budget), so the samples are spaced
    // evenly in logit(x) to resolve both ends of the interval.
    const double t_lo = logit(iv.lo);
    const double t_hi = logit(iv.hi);
    const auto node = [&](int m) {
      if (m <= 0) return iv.lo;
      if (m >= n - 1) return iv.hi;
      return std::clamp(logistic(t_lo + (t_hi - t_lo) * m / (n - 1)), iv.lo, iv.hi);
    };
    int best_m = 0;
    for (int m = 0; m < n; ++m) {
      const double x = node(m);
      const double f = line(x);
      ++evaluations;
      if (f < best_f) {
        best_f = f;
        best_x = x;
        best_m = m;
      }
    }
    lo = node(best_m - 1);
    hi = node(best_m + 1);
  }
  if (hi > lo) {
    const BracketResult r =
        brent_minimize(line, lo, hi, cfg.brent_xtol, cfg.brent_max_eval);
    evaluations += r.evaluations;
    if (r.f_star < best_f) {
      best_f = r.f_star;
      best_x = r.x_star;
    }
  }
  if (best_f < current_cost) {
    return {deviate(s, i, best_x, cfg.eps_min), best_f, evaluations};
  }
  return {s, current_cost, evaluations};
}

SweepResult sweep_impl(CountingObjective& objective, const Allocation& s,
                       const GameConfig& cfg, double current_cost) {
  Allocation cur = s;
  double c = current_cost;
  double delta = 0.0;
  const std::int64_t before = objective.evaluations;
  for (PlayerId i : kPlayers) {
    const BestResponse br = best_response_impl(objective, cur, i, cfg, c);
    delta = std::max(delta, cost_change(c, br.cost, cfg.relative_delta));
    cur = br.allocation;
    c = br.cost;
  }
  return {cur, c, delta, objective.evaluations - before};
}

double max_movement(const Allocation& a, const Allocation& b) {
  double m = 0.0;
  for (int k = 0; k < 3; ++k) {
    m = std::max(m, std::abs(a.shares()[k] - b.shares()[k]));
  }
  return m;
}

RestartTrace run_restart(ResourceOracle& oracle, const CircuitProfile& profile,
                         const GameConfig& cfg, int k) {
  RestartTrace trace;
  trace.index = k;
  trace.seed = derive_seed(cfg.rng_seed, static_cast<std::uint64_t>(k));
  CountingObjective objective(oracle, profile, cfg);
  try {
    DirichletSampler sampler(trace.seed);
    Allocation s = sampler.sample(cfg.eps_min);
    double c = objective(s);
    trace.records.push_back({0, s, c, 0.0, 0.0});
    for (int t = 0; t < cfg.max_sweeps_Tmax; ++t) {
      const SweepResult sw = sweep_impl(objective, s, cfg, c);
      trace.records.push_back(
          {t + 1, sw.allocation, sw.cost, sw.delta, max_movement(s, sw.allocation)});
      s = sw.allocation;
      c = sw.cost;
      if (sw.delta < cfg.tol_delta) {
        trace.converged = true;
        break;
      }
    }
  } catch (const Error& e) {
    trace.failure = RestartFailure{e.code(), e.what()};
  }
  trace.evaluations = objective.evaluations;
  return trace;
}

}  // namespace

bool SolveResult::converged() const noexcept {
  bool any = false;
  for (const auto& r : restarts) {
    if (r.failure) continue;
    if (!r.converged) return false;
    any = true;
  }
  return any;
}

BestResponse best_response(ResourceOracle& oracle, const CircuitProfile& profile,
                           const Allocation& s, PlayerId i,
                           const GameConfig& cfg,
                           std::optional<double> current_cost) {
  cfg.validate();
  CountingObjective objective(oracle, profile, cfg);
  const double c = current_cost ? *current_cost : objective(s);
  BestResponse br = best_response_impl(objective, s, i, cfg, c);
  br.evaluations = objective.evaluations;
  return br;
}

SweepResult sweep(ResourceOracle& oracle, const CircuitProfile& profile,
                  const Allocation& s, const GameConfig& cfg,
                  std::optional<double> current_cost) {
  cfg.validate();
  CountingObjective objective(oracle, profile, cfg);
  const double c = current_cost ? *current_cost : objective(s);
  SweepResult sw = sweep_impl(objective, s, cfg, c);
  sw.evaluations = objective.evaluations;
  return sw;
}

SolveResult solve(ResourceOracle& oracle, const CircuitProfile& profile,
                  const GameConfig& cfg, const SolveOptions& options) {
  cfg.validate();
  CountingObjective objective(oracle, profile, cfg);
  const Allocation u = uniform(cfg.eps_min);
  const double cu = objective(u);

  std::vector<RestartTrace> traces(static_cast<std::size_t>(cfg.restarts_K));
  const unsigned threads =
      oracle.reentrant() ? std::max(1u, options.threads) : 1u;
  if (threads == 1) {
    for (int k = 0; k < cfg.restarts_K; ++k) {
      traces[k] = run_restart(oracle, profile, cfg, k);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(threads, cfg.restarts_K);
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&] {
        for (int k = next++; k < cfg.restarts_K; k = next++) {
          traces[k] = run_restart(oracle, profile, cfg, k);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Merge in restart order with strict improvement so ties go to the
  // earliest restart regardless of how the restarts were scheduled.
  SolveResult result{u, cu, cu, {}, std::nullopt, objective.evaluations};
  const RestartFailure* first_failure = nullptr;
  bool any_completed = false;
  for (const auto& trace : traces) {
    result.oracle_evaluations += trace.evaluations;
    if (trace.failure) {
      if (!first_failure) first_failure = &*trace.failure;
      continue;
    }
    any_completed = true;
    const SweepRecord& last = trace.records.back();
    if (last.cost < result.c_star) {
      result.s_star = last.allocation;
      result.c_star = last.cost;
      result.winning_restart = trace.index;
    }
  }
  if (!any_completed && first_failure) {
    throw Error(first_failure->code,
                "every restart failed; first failure: " + first_failure->message);
  }
  result.restarts = std::move(traces);
  return result;
}

}  // namespace ftalloc
