#include "ftalloc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "ftalloc/error.hpp"

namespace ftalloc {

namespace {

void check_floor(double eps_min) {
  if (!(eps_min > 0.0)) {
    throw Error(ErrorCode::kBounds, "eps_min must be positive");
  }
  if (eps_min >= 1.0 / 3.0) {
    throw Error(ErrorCode::kInfeasibleFloor,
                "eps_min >= 1/3 leaves no feasible allocation");
  }
}

std::pair<int, int> opponents(PlayerId i) noexcept {
  switch (i) {
    case PlayerId::L: return {1, 2};
    case PlayerId::T: return {0, 2};
    case PlayerId::R: return {0, 1};
  }
  return {1, 2};
}

bool shares_feasible(const std::array<double, 3>& v, double eps_min) noexcept {
  const double upper = 1.0 - 2.0 * eps_min + kSimplexSumTol;
  for (double x : v) {
    if (!std::isfinite(x) || x < eps_min || x > upper) return false;
  }
  return std::abs(v[0] + v[1] + v[2] - 1.0) <= kSimplexSumTol;
}

struct Deviation {
  std::array<double, 3> shares;
  bool opponent_ok;
};

Deviation deviate_shares(const Allocation& s, PlayerId i, double x,
                         double eps_min) noexcept {
  const auto [j, k] = opponents(i);
  const auto& v = s.shares();
  const double rho = v[j] / (v[j] + v[k]);
  const double rest = 1.0 - x;
  std::array<double, 3> out{};
  out[static_cast<int>(i)] = x;
  out[j] = rho * rest;
  out[k] = rest - out[j];
  return {out, out[j] >= eps_min && out[k] >= eps_min};
}

}  // namespace

std::string_view to_string(PlayerId player) noexcept {
  switch (player) {
    case PlayerId::L: return "L";
    case PlayerId::T: return "T";
    case PlayerId::R: return "R";
  }
  return "?";
}

Allocation Allocation::make(const std::array<double, 3>& shares,
                            double eps_min) {
  check_floor(eps_min);
  if (!shares_feasible(shares, eps_min)) {
    throw Error(ErrorCode::kBounds,
                "allocation is outside the eps-interior of the simplex");
  }
  return Allocation(shares);
}

bool Allocation::feasible(double eps_min) const noexcept {
  return shares_feasible(shares_, eps_min);
}

Allocation uniform(double eps_min) {
  constexpr double third = 1.0 / 3.0;
  return Allocation::make({third, third, third}, eps_min);
}

Allocation clip_renormalize(const std::array<double, 3>& raw, double eps_min) {
  check_floor(eps_min);
  for (double x : raw) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorCode::kBounds, "raw profile must be finite and nonnegative");
    }
  }
  if (raw[0] == 0.0 && raw[1] == 0.0 && raw[2] == 0.0) {
    throw Error(ErrorCode::kDegenerateProfile, "all components are zero");
  }
  // Already feasible inputs pass through untouched, which makes the
  // operation idempotent bit-for-bit.
  if (shares_feasible(raw, eps_min)) return Allocation::make(raw, eps_min);

  // Scale onto the simplex first so the upper clip only matters for
  // already-normalized input; (2, 3, 5) must rescale to (0.2, 0.3, 0.5).
  const double raw_sum = raw[0] + raw[1] + raw[2];
  std::array<double, 3> v{};
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    v[i] = std::clamp(raw[i] / raw_sum, eps_min, 1.0);
    sum += v[i];
  }
  for (double& x : v) x /= sum;

  // Each pass pins at least one new component; at most two can ever be
  // pinned because eps_min < 1/3.
  std::array<bool, 3> pinned{false, false, false};
  for (int pass = 0; pass < 3; ++pass) {
    bool changed = false;
    for (int i = 0; i < 3; ++i) {
      if (!pinned[i] && v[i] < eps_min) {
        pinned[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
    int n_pinned = 0;
    double free_sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (pinned[i]) {
        ++n_pinned;
      } else {
        free_sum += v[i];
      }
    }
    const double free_mass = 1.0 - eps_min * n_pinned;
    for (int i = 0; i < 3; ++i) {
      v[i] = pinned[i] ? eps_min : v[i] * (free_mass / free_sum);
    }
  }
  return Allocation::make(v, eps_min);
}

Allocation deviate(const Allocation& s, PlayerId i, double x, double eps_min) {
  check_floor(eps_min);
  if (!(x >= eps_min && x <= 1.0 - 2.0 * eps_min)) {
    throw Error(ErrorCode::kBounds, "deviation outside [eps, 1 - 2 eps]");
  }
  // Recomputing the opponents from their ratio can push a share sitting
  // exactly on the floor an ulp below it.
  if (x == s[i]) return s;
  const Deviation d = deviate_shares(s, i, x, eps_min);
  if (!d.opponent_ok) {
    throw Error(ErrorCode::kOpponentFloor,
                "an opponent's share would fall below the floor");
  }
  return Allocation::make(d.shares, eps_min);
}

Interval deviation_interval(const Allocation& s, PlayerId i, double eps_min) {
  check_floor(eps_min);
  const auto [j, k] = opponents(i);
  const auto& v = s.shares();
  const double rho = v[j] / (v[j] + v[k]);
  double lo = eps_min;
  double hi = std::min({1.0 - 2.0 * eps_min, 1.0 - eps_min / rho,
                        1.0 - eps_min / (1.0 - rho)});
  // The closed form can land an ulp outside the feasible set.
  while (hi > lo && !deviate_shares(s, i, hi, eps_min).opponent_ok) {
    hi = std::nextafter(hi, lo);
  }
  while (lo < hi && !deviate_shares(s, i, lo, eps_min).opponent_ok) {
    lo = std::nextafter(lo, hi);
  }
  return {lo, hi};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) noexcept {
  // splitmix64 finalizer applied to a mix of the base seed and index.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(base ^ mix(k));
}

double DirichletSampler::unit_exponential() {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return -std::log1p(-u);
}

Allocation DirichletSampler::sample(double eps_min) {
  std::array<double, 3> e{};
  do {
    for (double& x : e) x = unit_exponential();
  } while (e[0] + e[1] + e[2] == 0.0);
  const double sum = e[0] + e[1] + e[2];
  for (double& x : e) x /= sum;
  return clip_renormalize(e, eps_min);
}

}  // namespace ftalloc
