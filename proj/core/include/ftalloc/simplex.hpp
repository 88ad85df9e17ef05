#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

namespace ftalloc {

// The three budget consumers, iterated in this order.
enum class PlayerId : int { L = 0, T = 1, R = 2 };

inline constexpr std::array<PlayerId, 3> kPlayers{PlayerId::L, PlayerId::T,
                                                  PlayerId::R};

std::string_view to_string(PlayerId player) noexcept;

inline constexpr double kSimplexSumTol = 1e-12;

// A strategy profile on the eps-interior of the 2-simplex. Immutable;
// feasibility is checked when constructed through make().
class Allocation {
 public:
  static Allocation make(const std::array<double, 3>& shares, double eps_min);

  double operator[](PlayerId player) const noexcept {
    return shares_[static_cast<int>(player)];
  }
  const std::array<double, 3>& shares() const noexcept { return shares_; }

  bool feasible(double eps_min) const noexcept;

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  explicit Allocation(const std::array<double, 3>& shares) : shares_(shares) {}
  std::array<double, 3> shares_;
};

// (1/3, 1/3, 1/3).
Allocation uniform(double eps_min);

// Clip into [eps_min, 1], normalize, then pin any component that fell below
// the floor and redistribute the remaining mass proportionally.
Allocation clip_renormalize(const std::array<double, 3>& raw, double eps_min);

// Player i moves to x; the two opponents split 1 - x keeping their ratio.
Allocation deviate(const Allocation& s, PlayerId i, double x, double eps_min);

struct Interval {
  double lo;
  double hi;
};

// Largest [eps_min, x_max] over which deviate(s, i, .) keeps both opponents
// at or above the floor. hi is verified against deviate() itself.
Interval deviation_interval(const Allocation& s, PlayerId i, double eps_min);

// Deterministic sub-seed for restart k; independent of the restart count.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) noexcept;

// Dirichlet(1,1,1) via three normalized unit exponentials, then
// clip_renormalize. One sampler per thread.
class DirichletSampler {
 public:
  explicit DirichletSampler(std::uint64_t seed) : engine_(seed) {}

  Allocation sample(double eps_min);

 private:
  double unit_exponential();

  std::mt19937_64 engine_;
};

}  // namespace ftalloc
