#include <cmath>
#include <random>

#include "doctest.h"
#include "ftalloc/cost_model.hpp"
#include "ftalloc/error.hpp"
#include "landscapes.hpp"

using namespace ftalloc;
using ftalloc::testing::reference_profile;

namespace {

constexpr double kEps = 0.005;

Allocation random_feasible(std::mt19937_64& rng) {
  std::exponential_distribution<double> e;
  return clip_renormalize({e(rng), e(rng), e(rng)}, kEps);
}

}  // namespace

TEST_CASE("partition scales the allocation by the total budget") {
  const BudgetPartition u = partition(uniform(kEps), 0.1);
  CHECK(u.eps_logical == doctest::Approx(0.1 / 3).epsilon(1e-15));
  CHECK(u.eps_tstates == u.eps_logical);
  CHECK(u.eps_rotations == u.eps_logical);

  const BudgetPartition b = partition(Allocation::make({0.5, 0.25, 0.25}, kEps), 0.1);
  CHECK(b.eps_logical == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(b.eps_tstates == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(b.eps_rotations == doctest::Approx(0.025).epsilon(1e-15));

  std::mt19937_64 rng(3);
  for (int n = 0; n < 1000; ++n) {
    const BudgetPartition p = partition(random_feasible(rng), 0.1);
    REQUIRE(std::abs(p.eps_logical + p.eps_tstates + p.eps_rotations - 0.1) <= 1e-12);
  }
}

TEST_CASE("code distance") {
  SUBCASE("d = 3 boundary") {
    const double target = 0.1 * std::pow(1e-3 / 1e-2, 2.0);
    CHECK(code_distance(target, 1e-3, 1e-2) == 3);
    CHECK(code_distance(0.5, 1e-3, 1e-2) == 3);
  }
  SUBCASE("1e-10 needs d = 17") {
    // tests/oracles/surrogate_reference.py, exact rationals.
    CHECK(code_distance(1e-10, 1e-3, 1e-2) == 17);
    CHECK(code_distance(0.99e-10, 1e-3, 1e-2) == 19);
  }
  SUBCASE("tighter targets never lower d") {
    int prev = 3;
    for (double t = 0.5; t > 1e-40; t *= 0.5) {
      const int d = code_distance(t, 1e-3, 1e-2);
      REQUIRE(d % 2 == 1);
      REQUIRE(d >= prev);
      prev = d;
    }
  }
  SUBCASE("overflow") {
    try {
      code_distance(1e-60, 1e-3, 1e-2);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDistanceOverflow);
    }
  }
}

TEST_CASE("rotation synthesis T cost") {
  CHECK(rotation_t_cost(0.5) == 4);
  CHECK(rotation_t_cost(std::nextafter(1.0, 0.0)) == 1);
  CHECK(rotation_t_cost(1.0 / 600.0) == 29);
  std::int64_t prev = 0;
  for (double t = 0.9; t > 1e-30; t *= 0.7) {
    const std::int64_t c = rotation_t_cost(t);
    REQUIRE(c >= prev);
    prev = c;
  }
  CHECK_THROWS_AS(rotation_t_cost(0.0), Error);
  CHECK_THROWS_AS(rotation_t_cost(1.0), Error);
}

TEST_CASE("distillation levels") {
  // One 15-to-1 round at p = 1e-3 reaches 35 p^2 = 3.5e-5.
  CHECK(distillation_levels(3.5e-5, 1e-3) == 1);
  CHECK(distillation_levels(3.4e-5, 1e-3) == 2);
  CHECK(distillation_levels(1e-12, 1e-3) == 3);
  try {
    distillation_levels(1e-40, 1e-3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDistillationOverflow);
  }
}

TEST_CASE("surrogate estimate on the reference profile") {
  const GameConfig cfg;
  // Golden values from tests/oracles/surrogate_reference.py.
  SUBCASE("uniform") {
    const SurrogateBreakdown b = surrogate_breakdown(uniform(kEps), reference_profile(), cfg);
    CHECK(b.distance == 7);
    CHECK(b.levels == 1);
    CHECK(b.total_t == 630);
    CHECK(b.estimate.physical_qubits == 2450.0);
    CHECK(b.estimate.runtime_seconds == doctest::Approx(0.00441).epsilon(1e-15));
  }
  SUBCASE("(0.5, 0.25, 0.25)") {
    const SurrogateBreakdown b = surrogate_breakdown(
        Allocation::make({0.5, 0.25, 0.25}, kEps), reference_profile(), cfg);
    CHECK(b.distance == 7);
    CHECK(b.levels == 1);
    CHECK(b.total_t == 650);
    CHECK(b.estimate.physical_qubits == 2450.0);
    CHECK(b.estimate.runtime_seconds == doctest::Approx(0.00455).epsilon(1e-15));
  }
}

TEST_CASE("no magic states means no factory") {
  CircuitProfile p = reference_profile();
  p.t_count = 0;
  p.rotation_count = 0;
  const SurrogateBreakdown b = surrogate_breakdown(uniform(kEps), p, GameConfig{});
  CHECK(b.factory_qubits == 0.0);
  CHECK(b.levels == 0);
  const double d = b.distance;
  CHECK(b.estimate.physical_qubits == 10 * 2 * d * d);
  CHECK(b.estimate.runtime_seconds == doctest::Approx(100 * d * 1e-6).epsilon(1e-15));
}

TEST_CASE("estimate is deterministic") {
  std::mt19937_64 rng(11);
  const GameConfig cfg;
  for (int n = 0; n < 200; ++n) {
    const Allocation s = random_feasible(rng);
    const ResourceEstimate a = estimate(s, reference_profile(), cfg);
    const ResourceEstimate b = estimate(s, reference_profile(), cfg);
    REQUIRE(a.physical_qubits == b.physical_qubits);
    REQUIRE(a.runtime_seconds == b.runtime_seconds);
  }
}

TEST_CASE("budget pressure is monotone per player") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GameConfig cfg;
  CircuitProfile p = reference_profile();
  p.t_count = 400;
  p.rotation_count = 300;
  for (int n = 0; n < 500; ++n) {
    const Allocation s = random_feasible(rng);
    for (PlayerId i : kPlayers) {
      const Interval iv = deviation_interval(s, i, kEps);
      double x1 = iv.lo + (iv.hi - iv.lo) * u(rng);
      double x2 = iv.lo + (iv.hi - iv.lo) * u(rng);
      if (x1 > x2) std::swap(x1, x2);  // x1 is the tighter budget
      const auto tight = surrogate_breakdown(deviate(s, i, x1, kEps), p, cfg);
      const auto loose = surrogate_breakdown(deviate(s, i, x2, kEps), p, cfg);
      switch (i) {
        case PlayerId::L:
          REQUIRE(tight.distance >= loose.distance);
          REQUIRE(tight.patch_qubits >= loose.patch_qubits);
          break;
        case PlayerId::T:
          REQUIRE(tight.levels >= loose.levels);
          break;
        case PlayerId::R:
          REQUIRE(tight.total_t >= loose.total_t);
          break;
      }
    }
  }
}

TEST_CASE("cost and space-time volume") {
  CHECK(cost({100.0, 100.0}, 0.5) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(cost({4.0, 9.0}, 0.5) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(space_time_volume({4.0, 9.0}) == 36.0);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const ResourceEstimate e{1.0 + 1e6 * u(rng), 1e-6 + 10.0 * u(rng)};
    const double c = cost(e, 0.5);
    REQUIRE(std::abs(c * c - space_time_volume(e)) <= 1e-9 * space_time_volume(e));
    const double w = 0.01 + 0.98 * u(rng);
    REQUIRE(cost({e.physical_qubits * 1.01, e.runtime_seconds}, w) > cost(e, w));
    REQUIRE(cost({e.physical_qubits, e.runtime_seconds * 1.01}, w) > cost(e, w));
  }
}

TEST_CASE("circuit profile files") {
  SUBCASE("round trip with defaults") {
    const CircuitProfile p = parse_profile(
        R"({"name":"x","n_qubits":4,"depth":9,"t_count":2,"rotation_count":1})");
    CHECK(p.name == "x");
    CHECK(p.depth == 9);
    CHECK(p.p_phys == 1e-3);
    CHECK(p.p_threshold == 1e-2);
    CHECK(p.cycle_time_us == 1.0);
    const CircuitProfile q = parse_profile(dump_profile(p));
    CHECK(q.name == p.name);
    CHECK(q.rotation_count == p.rotation_count);
  }
  SUBCASE("rejections") {
    const auto code_of = [](const std::string& text) {
      try {
        parse_profile(text);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::kUsage;
    };
    CHECK(code_of(R"({"name":"x","n_qubits":4,"depth":9,"t_count":2,"rotation_count":1,"tcount":3})") ==
          ErrorCode::kInvalidProfile);
    CHECK(code_of(R"({"name":"x","n_qubits":4,"depth":9,"t_count":2})") ==
          ErrorCode::kInvalidProfile);
    CHECK(code_of(R"({"name":"x","n_qubits":4.5,"depth":9,"t_count":2,"rotation_count":1})") ==
          ErrorCode::kInvalidProfile);
    CHECK(code_of(R"({"name":"x","n_qubits":0,"depth":9,"t_count":2,"rotation_count":1})") ==
          ErrorCode::kInvalidProfile);
    CHECK(code_of(R"({"name":"x","n_qubits":1,"depth":9,"t_count":2,"rotation_count":1,"p_phys":0.02})") ==
          ErrorCode::kInvalidProfile);
    CHECK(code_of("[1,2,3]") == ErrorCode::kInvalidProfile);
    CHECK(code_of("{not json") == ErrorCode::kInvalidProfile);
  }
}

TEST_CASE("synthetic oracle maps overflow to an infeasible point") {
  SyntheticOracle oracle;
  const GameConfig cfg;
  CircuitProfile near_threshold = reference_profile();
  near_threshold.p_phys = 9.9e-3;
  CHECK_FALSE(oracle.evaluate(uniform(kEps), near_threshold, cfg).has_value());
  CHECK(std::isinf(oracle.evaluate_cost(uniform(kEps), near_threshold, cfg)));

  CircuitProfile t_heavy = reference_profile();
  t_heavy.p_phys = 5e-3;
  t_heavy.t_count = 10'000'000'000'000;
  CHECK_FALSE(oracle.evaluate(uniform(kEps), t_heavy, cfg).has_value());

  CHECK(oracle.evaluate(uniform(kEps), reference_profile(), cfg).has_value());
  CHECK(oracle.reentrant());
}
