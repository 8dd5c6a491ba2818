// Prints the brute-force reference values frozen into the test suites.
// Not part of ctest; rerun by hand when a fixture must be regenerated.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "oracles/dense_eigen.hpp"
#include "oracles/moving_front.hpp"
#include "wulffspread/terrace.hpp"
#include "wulffspread/waves.hpp"

using namespace wulffspread;

namespace {

void eigen_oracles() {
  Model m = builtin_model("sinusoidal_kpp");
  double k[3];
  int grids[3] = {64, 128, 256};
  for (int i = 0; i < 3; ++i) {
    GridSpec g = GridSpec::cell(1, grids[i]);
    k[i] = oracle::dense_k(PeriodicCoefficients::sample(m, g), {0.0, 0.0}, g);
    std::printf("sinusoidal_kpp k(0) dense n=%d: %.12f\n", grids[i], k[i]);
  }
  std::printf("  richardson 64/128:  %.12f\n", oracle::richardson(k[0], k[1]));
  std::printf("  richardson 128/256: %.12f\n", oracle::richardson(k[1], k[2]));

  GridSpec g64 = GridSpec::cell(1, 64);
  auto c64 = PeriodicCoefficients::sample(m, g64);
  auto scan = oracle::lambda_scan(c64, {1.0, 0.0}, g64);
  std::printf("sinusoidal_kpp c*(+1) lambda scan n=64: c=%.12f lambda=%.9f\n", scan.c_star,
              scan.lambda_star);
  auto scan_m = oracle::lambda_scan(c64, {-1.0, 0.0}, g64);
  std::printf("sinusoidal_kpp c*(-1) lambda scan n=64: c=%.12f lambda=%.9f\n", scan_m.c_star,
              scan_m.lambda_star);

  GridSpec g48 = GridSpec::cell(1, 48);
  auto c48 = PeriodicCoefficients::sample(m, g48);
  double k48 = oracle::dense_k(c48, {0.0, 0.0}, g48);
  auto scan48 = oracle::lambda_scan(c48, {1.0, 0.0}, g48);
  std::printf("1D n=48: k(0)=%.12f  2 sqrt(k0)=%.12f  c*(+1)=%.12f\n", k48, 2.0 * std::sqrt(k48),
              scan48.c_star);
}

void ap_oracles() {
  for (double amp : {0.0, 0.05}) {
    Model m = builtin_model("ap_time_bistable", {.theta = 0.25, .amplitude = amp});
    for (double h : {0.1, 0.05}) {
      auto r = oracle::moving_front_speed(
          [&](double t, double u) { return m.reaction({0.0, 0.0}, t, u); }, 2000.0, h);
      std::printf("ap_time_bistable amp=%g T=2000 h=%g: front speed %.7f\n", amp, h,
                  r.average_speed);
    }
  }
}

// Fine-tolerance shooting: integrator tolerance 1e-12, bracket 1e-11.
void wave_oracles() {
  ShootingOptions fine;
  fine.tolerance = 1e-12;
  fine.speed_tolerance = 1e-11;
  auto combustion = Kinetics::of([](double u) { return 2.0 * std::max(0.0, u - 0.3) * (1.0 - u); });
  std::printf("combustion theta=0.3: c = %.10f\n", separating_speed(combustion, 0.0, 1.0, fine, 0.0, 1.0));
  auto hump = Kinetics::of([](double u) { return 2.0 * std::max(0.0, u - 0.9) * (1.0 - u); });
  std::printf("combustion theta=0.9: c = %.10f\n", separating_speed(hump, 0.0, 1.0, fine, 0.0, 1.0));
  auto pushed = Kinetics::of(ReactionTerm::monostable());
  std::printf("u^2(1-u): c_min = %.10f\n", monostable_min_speed(pushed, 0.0, 1.0, fine));
  auto q = Kinetics::of(builtin_model("quintic_multistable").reaction);
  std::printf("quintic 1 -> 0.5: %.10f, 0.5 -> 0: %.10f\n", separating_speed(q, 0.5, 1.0, fine),
              separating_speed(q, 0.0, 0.5, fine));
  TerraceDecomposition t = compute_terrace(q, fine);
  for (std::size_t m = 0; m < t.speeds.size(); ++m)
    std::printf("quintic tier %zu: %.6f -> %.6f, c = %.10f\n", m + 1, t.levels[m + 1], t.levels[m],
                t.speeds[m]);
}

}  // namespace

int main(int argc, char** argv) {
  std::string which = argc > 1 ? argv[1] : "all";
  if (which == "all" || which == "eigen") eigen_oracles();
  if (which == "all" || which == "ap") ap_oracles();
  if (which == "all" || which == "waves") wave_oracles();
  return 0;
}
