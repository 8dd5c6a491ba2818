#include <cmath>
#include <random>

#include <doctest.h>

#include "wulffspread/terrace.hpp"

using namespace wulffspread;

namespace {

Model quintic() { return builtin_model("quintic_multistable"); }

}  // namespace

TEST_CASE("single-tier terraces") {
  TerraceDecomposition cubic = compute_terrace(Kinetics::of(ReactionTerm::bistable(0.3)));
  REQUIRE(cubic.tiers() == 1);
  CHECK(cubic.levels == std::vector<double>{0.0, 1.0});
  CHECK(std::abs(cubic.speeds[0] - 0.4 / std::sqrt(2.0)) <= 1e-5);
  CHECK(cubic.check().empty());

  TerraceDecomposition kpp = compute_terrace(Kinetics::of(ReactionTerm::kpp()));
  REQUIRE(kpp.tiers() == 1);
  CHECK(std::abs(kpp.speeds[0] - 2.0) <= 1e-3);
}

TEST_CASE("quintic terrace has two tiers") {
  Model m = quintic();
  TerraceDecomposition t = compute_terrace(Kinetics::of(m.reaction));
  REQUIRE(t.tiers() == 2);
  CHECK(t.levels[0] == 0.0);
  CHECK(std::abs(t.levels[1] - m.expectation("theta1")->value) <= 1e-9);
  CHECK(t.levels[2] == 1.0);
  CHECK(std::abs(t.speeds[0] - m.expectation("c1")->value) <= 1e-6);
  CHECK(std::abs(t.speeds[1] - m.expectation("c2")->value) <= 1e-6);
  CHECK(t.speeds[0] - t.speeds[1] > 1e-6);
  CHECK(t.check().empty());
  CHECK(t.pre_merge_levels == t.levels);
}

TEST_CASE("a slower lower tier is merged into one connection") {
  // Here the 1 -> 0.5 wave outruns the 0.5 -> 0 wave, so no terrace forms.
  Kinetics f = Kinetics::of(ReactionTerm::multistable({0.15, 0.5, 0.68}, 24.0));
  double upper = separating_speed(f, 0.5, 1.0);
  double lower = separating_speed(f, 0.0, 0.5);
  REQUIRE(upper > lower);
  TerraceDecomposition t = compute_terrace(f);
  REQUIRE(t.tiers() == 1);
  CHECK(t.speeds[0] > lower);
  CHECK(t.speeds[0] < upper);
  CHECK(t.check().empty());
}

TEST_CASE("equal-speed removal") {
  SpeedSelection s = remove_equal_speeds({0.0, 0.2, 0.6, 1.0}, {0.9, 0.5, 0.5});
  CHECK(s.levels == std::vector<double>{0.0, 0.2, 1.0});
  CHECK(s.speeds == std::vector<double>{0.9, 0.5});
  CHECK(s.kept == std::vector<int>{0, 2});

  std::mt19937 rng(11);
  std::uniform_int_distribution<int> pick(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    int tiers = 1 + trial % 6;
    std::vector<double> levels = {0.0}, speeds;
    for (int k = 1; k <= tiers; ++k) levels.push_back(static_cast<double>(k) / tiers);
    for (int k = 0; k < tiers; ++k) speeds.push_back(1.0 - 0.1 * pick(rng));
    std::sort(speeds.rbegin(), speeds.rend());
    SpeedSelection once = remove_equal_speeds(levels, speeds);
    SpeedSelection twice = remove_equal_speeds(once.levels, once.speeds);
    CHECK(twice.levels == once.levels);
    CHECK(twice.speeds == once.speeds);
    for (std::size_t k = 1; k < once.speeds.size(); ++k) CHECK(once.speeds[k - 1] > once.speeds[k]);
  }
}

TEST_CASE("scaling f multiplies the speeds by the square root") {
  Model m = quintic();
  Kinetics f = Kinetics::of(m.reaction);
  TerraceDecomposition base = compute_terrace(f);
  TerraceDecomposition scaled = compute_terrace(f.scaled(4.0));
  REQUIRE(scaled.tiers() == base.tiers());
  for (int k = 0; k < base.tiers(); ++k) CHECK(std::abs(scaled.speeds[k] / base.speeds[k] - 2.0) <= 2e-3);
  for (std::size_t k = 0; k < base.levels.size(); ++k) CHECK(std::abs(scaled.levels[k] - base.levels[k]) <= 1e-9);
}

TEST_CASE("model outside the scope is rejected") {
  // f < 0 on (0, 1): 1 is not stable from below.
  auto f = Kinetics::of([](double u) { return -u * (1.0 - u); });
  CHECK_THROWS_AS(compute_terrace(f), ModelError);
  // Tier 0.5 -> 0 with negative speed.
  auto g = Kinetics::of(ReactionTerm::multistable({0.4, 0.5, 0.6}, 24.0));
  CHECK_THROWS_AS(compute_terrace(g), ModelError);
}

TEST_CASE("empirical terraces from 1D runs") {
  SUBCASE("cubic bistable") {
    Model m = builtin_model("cubic_bistable", {.theta = 0.3});
    EmpiricalTerrace e = terrace_run(m, 60.0, {.speed_guess = 0.5});
    REQUIRE(e.speeds.size() == 1);
    CHECK(std::abs(e.speeds[0] / (0.4 / std::sqrt(2.0)) - 1.0) <= 0.02);
  }
  SUBCASE("kpp") {
    Model m = builtin_model("homogeneous_kpp");
    EmpiricalTerrace e = terrace_run(m, 100.0, {.speed_guess = 2.2});
    REQUIRE(e.speeds.size() == 1);
    CHECK(std::abs(e.speeds[0] / 2.0 - 1.0) <= 0.02);
  }
  SUBCASE("quintic") {
    Model m = quintic();
    TerraceDecomposition t = compute_terrace(Kinetics::of(m.reaction));
    EmpiricalTerrace e = terrace_run(m, 80.0, {.speed_guess = 0.8});
    REQUIRE(e.levels.size() == 3);
    CHECK(std::abs(e.levels[1] - t.levels[1]) <= 0.02);
    REQUIRE(e.speeds.size() == 2);
    CHECK(std::abs(e.speeds[0] / t.speeds[0] - 1.0) <= 0.05);
    CHECK(std::abs(e.speeds[1] / t.speeds[1] - 1.0) <= 0.05);
  }
  SUBCASE("too short to resolve") {
    Model m = quintic();
    GridSpec g = GridSpec::box(1, 10.0, 0.05);
    std::vector<Field> fields = {Field::from_function(g, [](Vec2 x) { return 0.5 + 0.02 * x[0]; })};
    CHECK_THROWS_AS(terrace_from_run({0.0}, fields, Kinetics::of(m.reaction)), NumericalError);
  }
}

TEST_CASE("multitier probes in 1D") {
  SUBCASE("cubic bistable") {
    Model m = builtin_model("cubic_bistable", {.theta = 0.3});
    TerraceDecomposition t = compute_terrace(Kinetics::of(m.reaction));
    // 0.1 c T has to clear the initial width of the bump.
    double T = 400.0;
    GridSpec g = GridSpec::box(1, 1.1 * t.speeds[0] * T + 10.0, 0.05);
    MultitierReport r = verify_multitier(m, t, g, T);
    CHECK(r.probes.size() == 2);
    CHECK(r.passed());
  }
  SUBCASE("quintic") {
    Model m = quintic();
    TerraceDecomposition t = compute_terrace(Kinetics::of(m.reaction));
    double T = 200.0;
    CHECK((t.speeds[0] - t.speeds[1]) * T >= 20.0);
    GridSpec g = GridSpec::box(1, 1.1 * t.speeds[0] * T + 10.0, 0.05);
    MultitierReport r = verify_multitier(m, t, g, T);
    REQUIRE(r.probes.size() == 3);
    CHECK(r.probes[0].kind == "plateau");
    CHECK(std::abs(r.probes[0].worst - 0.5) <= 0.05);
    CHECK(r.passed());
  }
  SUBCASE("box too small") {
    Model m = quintic();
    TerraceDecomposition t = compute_terrace(Kinetics::of(m.reaction));
    CHECK_THROWS_AS(verify_multitier(m, t, GridSpec::box(1, 50.0, 0.1), 200.0), ModelError);
  }
}
