#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <doctest.h>

#include "wulffspread/eigensolver.hpp"
#include "wulffspread/io.hpp"
#include "wulffspread/pdesim.hpp"

using namespace wulffspread;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k) worst = std::max(worst, std::abs(a.data[k] - b.data[k]));
  return worst;
}

}  // namespace

TEST_CASE("equilibria stay put") {
  Model m = builtin_model("homogeneous_kpp");
  GridSpec g = GridSpec::box(2, 5.0, 0.25);
  auto r0 = run(m, Field(g, 0.0), 2.0);
  CHECK(r0.u.max() == 0.0);
  CHECK(r0.u.min() == 0.0);

  GridSpec p = GridSpec::box(2, 5.0, 0.25, true);
  auto r1 = run(m, Field(p, 1.0), 2.0, {}, {.boundary = Boundary::periodic()});
  CHECK(r1.u.max() == 1.0);
  CHECK(r1.u.min() == 1.0);
}

TEST_CASE("step size and stencil checks") {
  Model m = builtin_model("homogeneous_kpp");
  GridSpec g = GridSpec::box(1, 10.0, 0.1);
  double bound = monotone_dt_bound(m, g);
  CHECK(bound == doctest::Approx(1.0 / (2.0 / 0.01 + m.reaction.lipschitz())));
  CHECK_THROWS_AS(Simulator(m, Field(g), 1.5 * bound), ModelError);
  CHECK_NOTHROW(Simulator(m, Field(g), bound));

  Model sheared = m;
  sheared.coefficients.shear_amplitude = 30.0;
  GridSpec coarse = GridSpec::box(2, 4.0, 0.25);
  CHECK_THROWS_AS(run(sheared, Field(coarse), 0.1), ModelError);

  Field bad(g, 0.0);
  bad.data[10] = 1.5;
  CHECK_THROWS_AS(run(m, bad, 0.1), ModelError);
}

TEST_CASE("interface tracking on a synthetic translating profile") {
  GridSpec g = GridSpec::box(1, 20.0, 0.1);
  const double h = g.spacing(), dt_out = 0.37;
  InterfaceObserver tracker({1.0, 0.0}, 0.5);
  for (int n = 0; n < 40; ++n) {
    Field u = Field::from_function(g, [&](Vec2 x) {
      return 1.0 / (1.0 + std::exp(2.0 * (x[0] - 1.234 - n * h)));
    });
    tracker.observe({n * dt_out, n, u});
  }
  auto track = tracker.track();
  CHECK(std::abs(track.fit_speed - h / dt_out) <= 1e-12);
  CHECK(track.fit_points == 20);
}

TEST_CASE("level position edge cases") {
  GridSpec g = GridSpec::box(1, 10.0, 0.5);
  CHECK_FALSE(level_position(Field(g, 0.0), {1.0, 0.0}, 0.5).has_value());
  CHECK_FALSE(level_position(Field(g, 1.0), {1.0, 0.0}, 0.5).has_value());
  Field step = Field::from_function(g, [](Vec2 x) { return x[0] >= -6.0 && x[0] <= -3.0 ? 1.0 : 0.0; });
  CHECK(level_position(step, {-1.0, 0.0}, 0.5).value() == doctest::Approx(6.25));
  CHECK_FALSE(level_position(step, {1.0, 0.0}, 0.5).has_value());
}

TEST_CASE("directional radius of a synthetic cone") {
  GridSpec g = GridSpec::box(2, 12.0, 0.1);
  RadiusObserver observer({{1, 0}, {1, 1}, {-0.3, 1}, {0, -1}}, 0.5);
  for (double t : {1.0, 2.0, 4.0}) {
    Field u = Field::from_function(g, [&](Vec2 x) {
      return std::max(0.0, 1.0 - std::hypot(x[0], x[1]) / (2.0 * t));
    });
    observer.observe({t, 0, u});
  }
  for (const auto& c : observer.curves()) {
    for (std::size_t k = 0; k < c.times.size(); ++k)
      CHECK(c.radii[k].value() == doctest::Approx(c.times[k]).epsilon(2e-3));
    CHECK(c.terminal_average_speed().value() == doctest::Approx(1.0).epsilon(2e-3));
  }
  RadiusObserver empty({{1, 0}}, 0.5);
  empty.observe({1.0, 0, Field(g, 0.0)});
  CHECK_FALSE(empty.curves()[0].radii[0].has_value());
  CHECK_FALSE(empty.curves()[0].terminal_average_speed().has_value());
}

TEST_CASE("comparison principle") {
  GridSpec g = GridSpec::box(1, 20.0, 0.1);
  SUBCASE("scaled bumps, cubic bistable") {
    Model m = builtin_model("cubic_bistable", {.theta = 0.3});
    Field low = Field::from_function(g, bump_datum(3.0, 0.3));
    Field high = Field::from_function(g, bump_datum(3.0, 0.6));
    CHECK(comparison_check(m, low, high, 5.0) <= 1e-10);
  }
  SUBCASE("identical data") {
    Model m = builtin_model("sinusoidal_kpp");
    Field u = Field::from_function(g, bump_datum(2.0, 0.8));
    CHECK(comparison_check(m, u, u, 3.0) == 0.0);
  }
  SUBCASE("random ordered pairs, sinusoidal KPP") {
    Model m = builtin_model("sinusoidal_kpp");
    GridSpec small = GridSpec::box(1, 8.0, 0.1);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
      Field high(small), low(small);
      for (std::size_t k = 0; k < high.data.size(); ++k) {
        high.data[k] = unit(rng);
        low.data[k] = std::max(0.0, high.data[k] - 0.3 * unit(rng));
      }
      worst = std::max(worst, comparison_check(m, low, high, 1.0));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("translation equivariance on a periodic box") {
  Model m = builtin_model("cubic_bistable", {.theta = 0.3});
  GridSpec g = GridSpec::box(2, 6.0, 0.2, true);
  SimulationOptions opts{.boundary = Boundary::periodic()};
  Field u0 = Field::from_function(g, bump_datum(2.0));
  const int shift = 7;
  Field shifted(g);
  for (int j = 0; j < shifted.ny(); ++j)
    for (int i = 0; i < shifted.nx(); ++i) shifted.at((i + shift) % shifted.nx(), j) = u0.at(i, j);
  auto a = run(m, u0, 2.0, {}, opts), b = run(m, shifted, 2.0, {}, opts);
  double worst = 0.0;
  for (int j = 0; j < g.points_per_axis; ++j)
    for (int i = 0; i < g.points_per_axis; ++i)
      worst = std::max(worst, std::abs(b.u.at((i + shift) % g.points_per_axis, j) - a.u.at(i, j)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("even data stay even") {
  Model m = builtin_model("homogeneous_kpp");
  GridSpec g = GridSpec::box(2, 14.0, 0.2);
  auto r = run(m, Field::from_function(g, bump_datum(1.5)), 3.0);
  const int n = g.points_per_axis;
  double worst = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(r.u.at(i, j) - r.u.at(n - 1 - i, j)));
      worst = std::max(worst, std::abs(r.u.at(i, j) - r.u.at(i, n - 1 - j)));
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("range preservation across the catalog") {
  GridSpec g = GridSpec::box(1, 15.0, 0.1);
  for (const auto& name : catalog_names()) {
    Model m = builtin_model(name);
    auto r = run(m, Field::from_function(g, bump_datum(4.0)), 4.0);
    CHECK(r.stats.min_value >= -1e-12);
    CHECK(r.stats.max_value <= 1.0 + 1e-12);
  }
}

TEST_CASE("boundary contamination is reported") {
  Model m = builtin_model("homogeneous_kpp");
  GridSpec g = GridSpec::box(1, 6.0, 0.1);
  Field u0 = Field::from_function(g, bump_datum(2.0));
  CHECK_THROWS_AS(run(m, u0, 5.0), NumericalError);
  SimulationOptions quiet;
  quiet.contamination_error = false;
  auto r = run(m, u0, 5.0, {}, quiet);
  CHECK(r.stats.max_contamination > 1e-3);
  CHECK_FALSE(r.stats.warnings.empty());
}

TEST_CASE("KPP spreading from compact data in 1D") {
  // The log-delay of KPP fronts keeps the last-half slope below 2 at T = 40
  // (about 1.95); the measured value must sit just under the eigen c* = 2.
  Model m = builtin_model("homogeneous_kpp");
  GridSpec g = GridSpec::box(1, 120.0, 0.05);
  InterfaceObserver tracker({1.0, 0.0}, 0.5);
  run(m, Field::from_function(g, [](Vec2 x) { return std::abs(x[0]) <= 1.0 ? 1.0 : 0.0; }), 40.0,
      {&tracker});
  double c = tracker.track().fit_speed;
  CHECK(c < 2.0);
  CHECK(c > 1.93);
}

TEST_CASE("front-like speeds") {
  SUBCASE("cubic bistable closed form") {
    Model m = builtin_model("cubic_bistable", {.theta = 0.3});
    auto r = front_like_speed(m, {1.0, 0.0}, 40.0, {.speed_guess = 1.0});
    CHECK(std::abs(r.speed / 0.28284271247461906 - 1.0) <= 0.02);
  }
  SUBCASE("homogeneous KPP, long run") {
    auto r = front_like_speed(builtin_model("homogeneous_kpp"), {-1.0, 0.0}, 100.0);
    CHECK(std::abs(r.speed / 2.0 - 1.0) <= 0.02);
  }
  SUBCASE("sinusoidal KPP against the eigen route") {
    Model m = builtin_model("sinusoidal_kpp");
    GridSpec cell = default_cell_grid(1);
    double eigen = critical_speed(PeriodicCoefficients::sample(m, cell), {1.0, 0.0}, cell).c_star;
    auto r = front_like_speed(m, {1.0, 0.0}, 100.0);
    CHECK(std::abs(r.speed - eigen) / eigen <= 0.03);
  }
  SUBCASE("non-reducible direction") {
    Model m = builtin_model("sinusoidal_kpp");
    CHECK_FALSE(reducible_along(m, {0.0, 1.0}));
    CHECK_THROWS_AS(front_like_speed(m, {0.0, 1.0}, 10.0), ModelError);
  }
}

TEST_CASE("2D homogeneous bump radii lag below 2") {
  Model m = builtin_model("homogeneous_kpp");
  GridSpec g = GridSpec::box(2, 64.0, 0.2);
  std::vector<Vec2> dirs;
  for (int k = 0; k < 16; ++k) dirs.push_back({std::cos(k * std::numbers::pi / 8), std::sin(k * std::numbers::pi / 8)});
  RadiusObserver radii(dirs, 0.5);
  SimulationOptions opts;
  opts.contamination_error = false;
  auto r = run(m, Field::from_function(g, bump_datum(2.0)), 30.0, {&radii}, opts);
  for (const auto& c : radii.curves()) {
    double speed = c.terminal_average_speed().value();
    CHECK(speed >= 1.7);
    CHECK(speed <= 2.0);
  }
  auto report = verify_spreading_set(r.u, 30.0, circle_shape(2, 2.0), 0.2);
  CHECK(report.passed());
  CHECK(verify_spreading_set(r.u, 30.0, circle_shape(2, 1.0), 0.2).outside_pass == false);
}

TEST_CASE("verification sanity inversions") {
  GridSpec g = GridSpec::box(2, 10.0, 0.25);
  auto shape = circle_shape(2, 2.0);
  auto ones = verify_spreading_set(Field(g, 1.0), 3.0, shape, 0.1);
  CHECK(ones.inside_pass);
  CHECK_FALSE(ones.outside_pass);
  CHECK(ones.outside_max == 1.0);
  auto zeros = verify_spreading_set(Field(g, 0.0), 3.0, shape, 0.1);
  CHECK_FALSE(zeros.inside_pass);
  CHECK(zeros.outside_pass);
  CHECK_THROWS_AS(verify_spreading_set(Field(g, 0.0), 10.0, shape, 0.1), ModelError);
}

TEST_CASE("almost-periodic average speeds") {
  SUBCASE("autonomous limit") {
    auto r = ap_average_speed(builtin_model("ap_time_bistable", {.amplitude = 0.0}), 100.0);
    double exact = (1.0 - 2.0 * 0.25) / std::sqrt(2.0);
    CHECK(std::abs(r.front_speed / exact - 1.0) <= 0.02);
    REQUIRE(r.bump_speed.has_value());
    CHECK(std::abs(*r.bump_speed / exact - 1.0) <= 0.02);
  }
  SUBCASE("modulated threshold, bump vs long-horizon front") {
    Model m = builtin_model("ap_time_bistable", {.theta = 0.25, .amplitude = 0.05});
    double front = m.expectation("front_speed")->value;
    auto r = ap_average_speed(m, 100.0);
    REQUIRE(r.bump_speed.has_value());
    CHECK(std::abs(*r.bump_speed / front - 1.0) <= 0.05);
    CHECK(std::abs(r.front_speed / front - 1.0) <= 0.05);
  }
  SUBCASE("small bump quenches") {
    auto m = builtin_model("ap_time_bistable", {.theta = 0.45, .amplitude = 0.2});
    auto r = ap_average_speed(m, 200.0, {.bump_radius = 1.0});
    CHECK(r.outcome == "no invasion");
    CHECK_FALSE(r.bump_speed.has_value());
  }
}

TEST_CASE("field dump round trip") {
  auto dir = std::filesystem::temp_directory_path() / "pdesim_dump_test";
  std::filesystem::create_directories(dir);
  for (bool periodic : {false, true}) {
    GridSpec g = GridSpec::box(2, 3.0, 0.25, periodic);
    Field u = Field::from_function(g, [](Vec2 x) { return 0.5 + 0.25 * std::sin(x[0] + 2 * x[1]); });
    auto path = (dir / "u.bin").string();
    write_field(path, u, 1.25, {{"model", "test"}});
    CHECK(std::filesystem::file_size(path) == 64 + 8 * u.data.size());
    auto back = read_field(path);
    CHECK(back.time == 1.25);
    CHECK(back.field.grid.periodic_box == periodic);
    CHECK(back.field.grid.spacing() == doctest::Approx(g.spacing()).epsilon(1e-15));
    CHECK(max_abs_diff(back.field, u) == 0.0);
    CHECK(std::filesystem::exists(path + ".meta"));
  }
  std::filesystem::remove_all(dir);
}
