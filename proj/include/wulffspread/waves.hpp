#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wulffspread/model.hpp"

namespace wulffspread {

/// Autonomous nonlinearity u -> f(u), zero outside [0, 1].
struct Kinetics {
  std::function<double(double)> f;
  std::function<double(double)> df;  // optional; one-sided differences otherwise
  std::function<double(double)> F;   // optional antiderivative with F(0) = 0

  double operator()(double u) const { return f(u); }
  /// f'(u) taken from inside [lo, hi] at the ends of that interval.
  double derivative(double u, double lo = 0.0, double hi = 1.0) const;
  /// Gauss-Kronrod quadrature when F is not supplied.
  double primitive(double u) const;

  /// Reaction at x = 0; throws ModelError for a time-dependent reaction.
  static Kinetics of(const ReactionTerm& reaction);
  static Kinetics of(std::function<double(double)> f);
  Kinetics scaled(double s) const;
  /// u -> -f(1 - u): a (lo, hi) wave of speed c becomes a (1 - hi, 1 - lo) wave of speed -c.
  Kinetics reflected() const;
};

struct ShootingOptions {
  double offset = 1e-8;             // launch distance below theta_hi
  double tolerance = 1e-10;         // integrator abs and rel tolerance
  double speed_tolerance = 1e-8;    // final bracket width
  double max_speed = 1e3;
  double max_length = 1e4;
  double sample_spacing = 0.01;     // profile sampling
};

struct WaveProfile {
  double theta_hi = 1.0;
  double theta_lo = 0.0;
  double c = 0.0;
  std::vector<double> x, profile, slope;
  double residual = 0.0;  // max |phi'' + c phi' + f(phi)| over the interior samples

  double value_at(double s) const;  // cubic Hermite, constant beyond the window
  double slope_at(double s) const;
  /// The s with phi(s) = level; level must lie strictly between the end values.
  double position_of(double level) const;
  /// u0(x) = phi(x . e - shift).
  std::function<double(Vec2)> datum(Vec2 e = {1.0, 0.0}, double shift = 0.0) const;
  /// Empty when the profile meets its invariants, otherwise the failures.
  std::vector<std::string> check() const;
};

/// Outcome of one trial speed: does the decreasing trajectory leaving theta_hi
/// cross below theta_lo?
struct ShotOutcome {
  bool overshoot = false;
  double lowest = 0.0;  // smallest phi reached before the run was classified
};

ShotOutcome shoot(const Kinetics& f, double theta_lo, double theta_hi, double c,
                  const ShootingOptions& options = {});

/// Infimum of the speeds whose trajectory stays above theta_lo, by bracket
/// expansion from [lower, upper] and bisection.
double separating_speed(const Kinetics& f, double theta_lo, double theta_hi,
                        const ShootingOptions& options = {}, double lower = -1.0,
                        double upper = 1.0);

/// Samples the trajectory at speed c (refined by further bisection from the
/// upper side) into a profile with phi(0) = (theta_lo + theta_hi) / 2.
WaveProfile assemble_wave(const Kinetics& f, double theta_lo, double theta_hi, double c,
                          const ShootingOptions& options = {});

WaveProfile bistable_wave(const Kinetics& f, double theta_lo, double theta_hi,
                          const ShootingOptions& options = {});
WaveProfile combustion_wave(const Kinetics& f, double theta_ignition,
                            const ShootingOptions& options = {});
double monostable_min_speed(const Kinetics& f, double theta_lo, double theta_hi,
                            const ShootingOptions& options = {});

// ------------------------------------------------------------- phase plane

/// q'' + f(q) = 0 launched from (phi0, slope0) in both directions.
struct PhasePlaneReport {
  double phi0 = 0.0;
  double slope0 = 0.0;
  /// inf of q on x >= 0 up to the first right stationary point; -infinity
  /// once q reaches 0 (f vanishes below 0, so q then decreases linearly).
  double inf_right = 0.0;
  double sup_left = 0.0;
  std::optional<double> x1;                // first stationary point on the left
  std::optional<double> x2;                // first zero on the right
  std::optional<double> right_stationary;  // first stationary point on the right
  bool left_inconclusive = false;
  bool right_inconclusive = false;
  double hamiltonian_drift = 0.0;  // max |H(x) - H(0)|, H = q'^2 / 2 + F(q)
  // Comparison with a wave phi through (phi0, phi'(0)), when one was supplied.
  std::optional<bool> right_conclusion;  // slope0 <= phi'(0): inf_right < phi(+inf)
  std::optional<bool> left_conclusion;   // phi'(0) <= slope0 < 0: sup_left < phi(-inf)
  // q sampled on [x1, x2] when both exist.
  std::vector<double> x, q, dq;
};

PhasePlaneReport phase_plane_bump(const Kinetics& f, double phi0, double slope0,
                                  const WaveProfile* wave = nullptr,
                                  const ShootingOptions& options = {});

// ---------------------------------------------------------- zero structure

struct ZeroInfo {
  double lo = 0.0, hi = 0.0;  // f vanishes on [lo, hi]; lo == hi for an isolated zero
  int left_sign = 0;          // sign of f just below lo (0 below u = 0)
  int right_sign = 0;         // sign of f just above hi (0 above u = 1)
  bool degenerate = false;    // touches zero without changing sign
  double level() const { return lo; }
  bool stable_from_below() const { return !degenerate && left_sign > 0; }
  bool stable() const { return !degenerate && left_sign >= 0 && right_sign <= 0 && left_sign != right_sign; }
};

struct StableLevel {
  double level = 0.0;
  double S = 0.0;  // largest S < level with f > 0 on (S, level)
};

struct StabilityReport {
  std::vector<ZeroInfo> zeros;
  std::vector<StableLevel> levels;  // zeros stable from below
  bool has_degenerate() const;
  std::optional<double> S_of(double level, double tol = 1e-8) const;
};

StabilityReport stability_intervals(const Kinetics& f, int samples = 10000);

// -------------------------------------------------------------- bump datum

struct TerraceDecomposition;

/// Even cut-off of q'' + f(q) = 0 about its maximum point, centred at 0:
/// b(x) = q(x1 + |x|) for |x| < x2 - x1 and 0 beyond.
struct BumpProfile {
  double target_level = 1.0;
  double x1 = 0.0, x2 = 0.0;  // construction coordinates, support (2 x1 - x2, x2)
  double peak = 0.0;          // q(x1)
  double launch_level = 0.0;  // phi(0)
  std::vector<double> r, values, slopes;  // q(x1 + r) and q'(x1 + r), r in [0, x2 - x1]
  std::vector<double> descent_levels;  // terrace levels q passed on its way to 0

  double half_width() const { return x2 - x1; }
  std::pair<double, double> support() const { return {2.0 * x1 - x2, x2}; }
  double value_at(double x) const;
  /// Radial datum b(max(0, |x| - plateau)); plateau = 0 is the bump itself.
  std::function<double(Vec2)> datum(double plateau = 0.0) const;
};

/// Proposition-type subsolution below the terrace level m (1-based).
BumpProfile build_bump_subsolution(const Kinetics& f, int m, const TerraceDecomposition& terrace,
                                   const ShootingOptions& options = {});

/// Grid version of the bump for spacing h: b_0 = peak, b_{-i} = b_i and
/// D (b_{i+1} - 2 b_i + b_{i-1}) / h^2 + f(b_i) = 0 while b_i > 0, then 0.
/// Sampled on a grid with a node at 0 it is an exact subsolution of the
/// explicit scheme, so runs from it are nondecreasing in time. Valid at the
/// grid nodes only (|x_1| / h is rounded).
std::function<double(Vec2)> discrete_bump(const Kinetics& f, const BumpProfile& bump, double spacing,
                                          double diffusion = 1.0);

struct BumpValidation {
  double min_increment = 0.0;  // over consecutive outputs, all nodes
  double origin_value = 0.0;   // u(T, 0)
  double T = 0.0;
  bool passed = false;
};

/// 1D run from the discrete bump: nondecreasing in time up to -tolerance and
/// u(T, 0) >= target_level - 0.01.
BumpValidation validate_bump(const Model& model, const BumpProfile& bump, double T,
                             double spacing = 0.05, double tolerance = 1e-10);

void write_wave_csv(const std::string& path, const WaveProfile& wave);

}  // namespace wulffspread
