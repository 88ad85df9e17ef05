#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>

#include "doctest.h"
#include "ftalloc/error.hpp"
#include "ftalloc/simplex.hpp"

using namespace ftalloc;

namespace {

constexpr double kEps = 0.005;

// Exact rational arithmetic for the clip-renormalize oracle.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) { reduce(); }
  void reduce() {
    const std::int64_t g = std::gcd(num, den);
    if (g != 0) {
      num /= g;
      den /= g;
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
  }
  friend Rational operator+(Rational a, Rational b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend Rational operator-(Rational a, Rational b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Scale onto the simplex, clip into [eps, 1], renormalize, then pin and
// redistribute until every component is at least eps.
std::array<Rational, 3> clip_renormalize_oracle(std::array<Rational, 3> v, Rational eps) {
  Rational sum = v[0] + v[1] + v[2];
  for (auto& x : v) {
    x = x / sum;
    if (x < eps) x = eps;
    if (Rational(1) < x) x = Rational(1);
  }
  sum = v[0] + v[1] + v[2];
  for (auto& x : v) x = x / sum;
  std::array<bool, 3> pinned{};
  for (int pass = 0; pass < 3; ++pass) {
    bool changed = false;
    for (int i = 0; i < 3; ++i) {
      if (!pinned[i] && v[i] < eps) pinned[i] = changed = true;
    }
    if (!changed) break;
    Rational free_sum;
    int n_pinned = 0;
    for (int i = 0; i < 3; ++i) {
      if (pinned[i]) {
        ++n_pinned;
      } else {
        free_sum = free_sum + v[i];
      }
    }
    const Rational free_mass = Rational(1) - eps * Rational(n_pinned);
    for (int i = 0; i < 3; ++i) v[i] = pinned[i] ? eps : v[i] * free_mass / free_sum;
  }
  return v;
}

Allocation random_feasible(std::mt19937_64& rng) {
  std::exponential_distribution<double> e;
  return clip_renormalize({e(rng), e(rng), e(rng)}, kEps);
}

}  // namespace

TEST_CASE("uniform is the simplex barycenter") {
  const Allocation u = uniform(kEps);
  for (PlayerId p : kPlayers) CHECK(u[p] == 1.0 / 3.0);
  CHECK(std::abs(u[PlayerId::L] + u[PlayerId::T] + u[PlayerId::R] - 1.0) <= 1e-15);
  CHECK(u.feasible(kEps));
}

TEST_CASE("Allocation::make enforces the eps-interior") {
  CHECK_NOTHROW(Allocation::make({0.2, 0.3, 0.5}, kEps));
  CHECK_THROWS_AS(Allocation::make({0.004, 0.496, 0.5}, kEps), Error);
  CHECK_THROWS_AS(Allocation::make({0.2, 0.3, 0.6}, kEps), Error);
  CHECK_THROWS_AS(Allocation::make({0.2, 0.3, 0.5}, 0.34), Error);
}

TEST_CASE("clip_renormalize examples") {
  SUBCASE("feasible input is returned unchanged") {
    const Allocation a = clip_renormalize({0.2, 0.3, 0.5}, kEps);
    CHECK(a.shares() == std::array<double, 3>{0.2, 0.3, 0.5});
  }
  SUBCASE("pure rescaling") {
    const Allocation a = clip_renormalize({2.0, 3.0, 5.0}, kEps);
    CHECK(a[PlayerId::L] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(a[PlayerId::T] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(a[PlayerId::R] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("zero component is pinned to the floor") {
    const auto expected =
        clip_renormalize_oracle({Rational(3, 5), Rational(2, 5), Rational(0)}, Rational(1, 200));
    // The oracle lands on (597/1000, 398/1000, 1/200).
    CHECK(expected[0].num == 597);
    CHECK(expected[0].den == 1000);
    CHECK(expected[1].num == 199);
    CHECK(expected[1].den == 500);
    const Allocation a = clip_renormalize({0.6, 0.4, 0.0}, kEps);
    CHECK(a[PlayerId::R] == kEps);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(a.shares()[k] - expected[k].value()) <= 1e-15);
  }
  SUBCASE("two components pinned") {
    const auto expected = clip_renormalize_oracle(
        {Rational(1), Rational(0), Rational(0)}, Rational(1, 200));
    const Allocation a = clip_renormalize({1.0, 0.0, 0.0}, kEps);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(a.shares()[k] - expected[k].value()) <= 1e-15);
    CHECK(a[PlayerId::T] == kEps);
    CHECK(a[PlayerId::R] == kEps);
  }
}

TEST_CASE("clip_renormalize errors") {
  try {
    clip_renormalize({0.0, 0.0, 0.0}, kEps);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateProfile);
  }
  try {
    clip_renormalize({0.2, 0.3, 0.5}, 1.0 / 3.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleFloor);
  }
  CHECK_THROWS_AS(clip_renormalize({-0.1, 0.5, 0.6}, kEps), Error);
}

TEST_CASE("clip_renormalize is feasible and idempotent on random input") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 5000; ++n) {
    std::array<double, 3> raw{u(rng), u(rng), u(rng)};
    // Push some samples to the boundary.
    if (n % 7 == 0) raw[n % 3] = 0.0;
    if (n % 11 == 0) raw[(n + 1) % 3] *= 1e-6;
    const Allocation once = clip_renormalize(raw, kEps);
    REQUIRE(once.feasible(kEps));
    for (double x : once.shares()) REQUIRE(x >= kEps);
    const Allocation twice = clip_renormalize(once.shares(), kEps);
    REQUIRE(twice == once);
  }
}

TEST_CASE("deviate examples") {
  SUBCASE("symmetric split") {
    const Allocation s = deviate(uniform(kEps), PlayerId::L, 0.5, kEps);
    CHECK(s[PlayerId::L] == 0.5);
    CHECK(s[PlayerId::T] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(s[PlayerId::R] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("opponent ratio is kept") {
    // rho = 0.2 / 0.7 for (L, R); T moves from 0.3 to 0.4.
    const Allocation s0 = Allocation::make({0.2, 0.3, 0.5}, kEps);
    const Allocation s = deviate(s0, PlayerId::T, 0.4, kEps);
    CHECK(s[PlayerId::T] == 0.4);
    CHECK(s[PlayerId::L] == doctest::Approx(0.6 * 0.2 / 0.7).epsilon(1e-14));
    CHECK(s[PlayerId::R] == doctest::Approx(0.6 * 0.5 / 0.7).epsilon(1e-14));
  }
  SUBCASE("moving to the current share is the identity") {
    const Allocation s0 = Allocation::make({0.2, 0.3, 0.5}, kEps);
    const Allocation s = deviate(s0, PlayerId::T, 0.3, kEps);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(s.shares()[k] - s0.shares()[k]) <= 1e-12);
  }
}

TEST_CASE("deviate errors") {
  const Allocation s0 = Allocation::make({0.2, 0.3, 0.5}, kEps);
  try {
    deviate(s0, PlayerId::L, 0.001, kEps);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBounds);
  }
  CHECK_THROWS_AS(deviate(s0, PlayerId::L, 0.995, kEps), Error);
  // Opponents at ratio 0.006 : 0.494; moving R to 0.9 starves L.
  const Allocation skewed = Allocation::make({0.006, 0.494, 0.5}, kEps);
  try {
    deviate(skewed, PlayerId::R, 0.9, kEps);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOpponentFloor);
  }
}

TEST_CASE("deviate keeps the simplex and the opponents' ratio") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 3000; ++n) {
    const Allocation s = random_feasible(rng);
    for (PlayerId i : kPlayers) {
      const Interval iv = deviation_interval(s, i, kEps);
      REQUIRE(iv.hi >= iv.lo);
      const double x = iv.lo + (iv.hi - iv.lo) * u(rng);
      const Allocation d = deviate(s, i, x, kEps);
      const auto& a = s.shares();
      const auto& b = d.shares();
      REQUIRE(std::abs(b[0] + b[1] + b[2] - 1.0) <= 1e-12);
      const int j = i == PlayerId::L ? 1 : 0;
      const int k = i == PlayerId::R ? 1 : 2;
      const double before = a[j] / a[k];
      const double after = b[j] / b[k];
      REQUIRE(std::abs(after - before) <= 1e-9 * before);

      const Allocation same = deviate(s, i, s[i], kEps);
      for (int c = 0; c < 3; ++c) REQUIRE(std::abs(same.shares()[c] - a[c]) <= 1e-12);

      // Both ends of the interval are themselves feasible deviations.
      CHECK_NOTHROW(deviate(s, i, iv.hi, kEps));
      CHECK_NOTHROW(deviate(s, i, iv.lo, kEps));
    }
  }
}

TEST_CASE("deviation_interval shrinks for extreme opponent ratios") {
  const Allocation s = Allocation::make({0.01, 0.005, 0.985}, kEps);
  const Interval iv = deviation_interval(s, PlayerId::L, kEps);
  // T holds 0.005 / 0.99 of the opponents' mass and already sits on the
  // floor, so L cannot grow at all: x_max = 1 - eps / rho = 0.01.
  CHECK(iv.lo == kEps);
  CHECK(iv.hi == doctest::Approx(1.0 - kEps / (0.005 / 0.99)).epsilon(1e-12));
  CHECK(iv.hi < 1.0 - 2 * kEps);
}

TEST_CASE("Dirichlet sampler") {
  SUBCASE("same seed, same sequence") {
    DirichletSampler a(42);
    DirichletSampler b(42);
    for (int n = 0; n < 100; ++n) REQUIRE(a.sample(kEps) == b.sample(kEps));
  }
  SUBCASE("different seeds diverge") {
    DirichletSampler a(42);
    DirichletSampler b(43);
    CHECK_FALSE(a.sample(kEps) == b.sample(kEps));
  }
  SUBCASE("mean is the barycenter and samples are feasible") {
    DirichletSampler sampler(2024);
    std::array<double, 3> mean{};
    constexpr int kSamples = 100000;
    for (int n = 0; n < kSamples; ++n) {
      const Allocation s = sampler.sample(kEps);
      REQUIRE(s.feasible(kEps));
      for (int k = 0; k < 3; ++k) mean[k] += s.shares()[k] / kSamples;
    }
    for (double m : mean) CHECK(std::abs(m - 1.0 / 3.0) <= 0.01);
  }
}

TEST_CASE("restart sub-seeds do not depend on each other") {
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
  CHECK(derive_seed(0, 3) != derive_seed(1, 3));
  CHECK(derive_seed(99, 5) == derive_seed(99, 5));
}
