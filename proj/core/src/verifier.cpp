#include "ftalloc/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>
#include <vector>

#include "ftalloc/error.hpp"

namespace ftalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridBest {
  double cost = kInf;
  std::int64_t a = -1;
  std::int64_t b = -1;
  std::int64_t points = 0;
};

bool better(const GridBest& x, const GridBest& y) {
  if (x.a < 0) return false;
  if (y.a < 0) return true;
  return std::tie(x.cost, x.a, x.b) < std::tie(y.cost, y.a, y.b);
}

}  // namespace

GridResult grid_minimize(ResourceOracle& oracle, const CircuitProfile& profile,
                         const GameConfig& cfg, double resolution,
                         unsigned threads) {
  cfg.validate();
  if (!(resolution > 0.0 && resolution <= 0.1)) {
    throw Error(ErrorCode::kBounds, "grid resolution must lie in (0, 0.1]");
  }
  const double h = resolution;
  const double eps = cfg.eps_min;
  const auto steps = static_cast<std::int64_t>(std::floor(1.0 / h + 1e-9));

  const auto scan_row = [&](std::int64_t a, GridBest& best) {
    const double s_l = static_cast<double>(a) * h;
    if (s_l < eps) return;
    for (std::int64_t b = 0; a + b <= steps; ++b) {
      const double s_t = static_cast<double>(b) * h;
      const double s_r = 1.0 - s_l - s_t;
      if (s_t < eps || s_r < eps) continue;
      const double c =
          oracle.evaluate_cost(Allocation::make({s_l, s_t, s_r}, eps), profile, cfg);
      ++best.points;
      // Rows and columns are visited in increasing order, so strict
      // comparison keeps the lexicographically first minimizer.
      if (best.a < 0 || c < best.cost) best = {c, a, b, best.points};
    }
  };

  const unsigned n = oracle.reentrant() ? std::max(1u, threads) : 1u;
  std::vector<GridBest> partial(n);
  if (n == 1) {
    for (std::int64_t a = 0; a <= steps; ++a) scan_row(a, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&, t] {
        for (std::int64_t a = t; a <= steps; a += n) scan_row(a, partial[t]);
      });
    }
    for (auto& th : pool) th.join();
  }

  GridBest best;
  std::int64_t points = 0;
  for (const auto& p : partial) {
    points += p.points;
    if (better(p, best)) best = p;
  }
  if (best.a < 0) throw Error(ErrorCode::kBounds, "grid has no feasible point");
  const double s_l = static_cast<double>(best.a) * h;
  const double s_t = static_cast<double>(best.b) * h;
  return {Allocation::make({s_l, s_t, 1.0 - s_l - s_t}, eps), best.cost, points};
}

EquilibriumCertificate certify_nash(ResourceOracle& oracle,
                                    const CircuitProfile& profile,
                                    const Allocation& s, const GameConfig& cfg,
                                    int samples_per_player, double bound) {
  cfg.validate();
  if (samples_per_player < 3) {
    throw Error(ErrorCode::kBounds, "samples_per_player must be >= 3");
  }
  EquilibriumCertificate cert{s, {}, samples_per_player, bound, true};
  const double base = oracle.evaluate_cost(s, profile, cfg);
  for (PlayerId i : kPlayers) {
    const Interval iv = deviation_interval(s, i, cfg.eps_min);
    double best = base;
    if (iv.hi > iv.lo) {
      for (int m = 0; m < samples_per_player; ++m) {
        const double x =
            m + 1 == samples_per_player
                ? iv.hi
                : iv.lo + (iv.hi - iv.lo) * m / (samples_per_player - 1);
        double c;
        try {
          c = oracle.evaluate_cost(deviate(s, i, x, cfg.eps_min), profile, cfg);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kOpponentFloor && e.code() != ErrorCode::kBounds) {
            throw;
          }
          continue;
        }
        best = std::min(best, c);
      }
    }
    const double gain = base > best ? base - best : 0.0;
    cert.improvement[static_cast<int>(i)] = gain;
    if (!(gain <= bound)) cert.pass = false;
  }
  return cert;
}

double improvement_percent(double volume_uniform, double volume_equilibrium) {
  return 100.0 * (1.0 - volume_equilibrium / volume_uniform);
}

ImprovementReport improvement(ResourceOracle& oracle,
                              const CircuitProfile& profile,
                              const GameConfig& cfg, const SolveResult& result) {
  const auto point = [&](const Allocation& s) {
    const auto est = oracle.evaluate(s, profile, cfg);
    if (!est) {
      throw Error(ErrorCode::kValidation,
                  "oracle reports no estimate at a reported allocation");
    }
    return OperatingPoint{s, *est, cost(*est, cfg.weight_w),
                          space_time_volume(*est)};
  };
  OperatingPoint u = point(uniform(cfg.eps_min));
  OperatingPoint e = point(result.s_star);
  const double pct = improvement_percent(u.volume, e.volume);
  return {profile.name, u, e, pct};
}

}  // namespace ftalloc
