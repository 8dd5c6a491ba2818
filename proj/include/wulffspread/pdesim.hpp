#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wulffspread/model.hpp"
#include "wulffspread/wulff.hpp"

namespace wulffspread {

/// Scalar field on the simulation box, node (i, j) at index i + nx * j.
struct Field {
  GridSpec grid;
  std::vector<double> data;

  Field() = default;
  explicit Field(const GridSpec& g, double value = 0.0);

  int nx() const { return grid.points_per_axis; }
  int ny() const { return grid.dim == 2 ? grid.points_per_axis : 1; }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx()) * j;
  }
  double& at(int i, int j = 0) { return data[index(i, j)]; }
  double at(int i, int j = 0) const { return data[index(i, j)]; }
  Vec2 point(int i, int j = 0) const;
  /// Linear (1D) or bilinear (2D) interpolation; nullopt outside the box.
  std::optional<double> sample(Vec2 x) const;
  double min() const;
  double max() const;

  static Field from_function(const GridSpec& g, const std::function<double(Vec2)>& u0);
};

// ----------------------------------------------------------- initial data

/// 1 on |x| <= radius, cosine ramp to 0 over `ramp`, times `height`.
std::function<double(Vec2)> bump_datum(double radius, double height = 1.0, double ramp = 1.0);
/// 1 for x.e <= 0, 1/2 (1 + cos(pi s)) for s = x.e in [0, 1], 0 beyond.
std::function<double(Vec2)> front_like_datum(Vec2 e);

// ------------------------------------------------------------- observers

struct Snapshot {
  double t = 0.0;
  long step = 0;
  const Field& u;
};

class Observer {
 public:
  virtual ~Observer() = default;
  virtual void observe(const Snapshot& s) = 0;
};

/// Largest s >= 0 with u(s e) >= eta, linearly interpolated between samples.
/// nullopt when the superlevel set misses the ray or reaches the box edge.
std::optional<double> level_position(const Field& u, Vec2 e, double eta);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square
  int points = 0;
};

/// Least squares over the samples with t >= t_first + fraction * (t_last - t_first).
LinearFit fit_tail(const std::vector<double>& t, const std::vector<std::optional<double>>& x,
                   double fraction = 0.5);

struct InterfaceTrack {
  Vec2 e = {1.0, 0.0};
  double eta = 0.5;
  std::vector<double> times;
  std::vector<std::optional<double>> positions;
  double fit_speed = 0.0;
  double fit_residual = 0.0;
  int fit_points = 0;

  /// Refits over the last `fraction` of the window.
  void fit(double fraction = 0.5);
};

class InterfaceObserver : public Observer {
 public:
  InterfaceObserver(Vec2 e, double eta = 0.5);
  void observe(const Snapshot& s) override;
  /// Track with fit_speed over the last half of the window.
  InterfaceTrack track() const;

 private:
  InterfaceTrack track_;
};

struct RadiusCurve {
  double eta = 0.5;
  Vec2 xi = {1.0, 0.0};
  std::vector<double> times;
  std::vector<std::optional<double>> radii;

  /// R(T) / T at the last sample; nullopt when R(T) is absent or T = 0.
  std::optional<double> terminal_average_speed() const;
};

class RadiusObserver : public Observer {
 public:
  RadiusObserver(std::vector<Vec2> directions, double eta = 0.5);
  void observe(const Snapshot& s) override;
  const std::vector<RadiusCurve>& curves() const { return curves_; }

 private:
  std::vector<RadiusCurve> curves_;
};

/// Copies of the field at output times, optionally thinned.
class SnapshotObserver : public Observer {
 public:
  explicit SnapshotObserver(int every = 1) : every_(every) {}
  void observe(const Snapshot& s) override;
  const std::vector<double>& times() const { return times_; }
  const std::vector<Field>& fields() const { return fields_; }

 private:
  int every_;
  int seen_ = 0;
  std::vector<double> times_;
  std::vector<Field> fields_;
};

/// min over consecutive outputs of u(t + dt_out) - u(t).
class MonotonicityObserver : public Observer {
 public:
  void observe(const Snapshot& s) override;
  double min_increment() const { return min_increment_; }

 private:
  std::vector<double> previous_;
  double min_increment_ = 0.0;
};

// -------------------------------------------------------------- simulator

enum class BoundaryKind { dirichlet, periodic };

struct Boundary {
  BoundaryKind kind = BoundaryKind::dirichlet;
  // Dirichlet values on the sides x1 = -L, x1 = +L, x2 = -L, x2 = +L.
  double left = 0.0, right = 0.0, bottom = 0.0, top = 0.0;

  static Boundary periodic() { return {BoundaryKind::periodic}; }
};

struct SimulationOptions {
  Boundary boundary;
  double dt = 0.0;              // 0 picks the largest stable step fitting T
  double safety = 0.9;          // fraction of the monotonicity bound
  int output_every = 0;         // 0: max(1, round(0.1 / dt))
  bool contamination_error = true;
  /// A 1D run samples the coefficients at x = s * ray_direction.
  Vec2 ray_direction = {1.0, 0.0};
};

struct SimulationStats {
  long steps = 0;
  double dt = 0.0;
  double max_contamination = 0.0;
  double min_value = 0.0;
  double max_value = 1.0;
  std::vector<std::string> warnings;
};

/// Largest dt with dt (2 dim a_max / h^2 + dim |q|_max / h + Lip f) <= 1.
double monotone_dt_bound(const Model& model, const GridSpec& grid, Vec2 ray_direction = {1.0, 0.0});

class Simulator {
 public:
  /// dt must already satisfy the monotonicity bound; throws ModelError otherwise.
  Simulator(const Model& model, Field u0, double dt, const SimulationOptions& options = {});

  void step();
  /// Steps until t = T (within dt / 2), notifying observers at the cadence.
  void advance_to(double T, const std::vector<Observer*>& observers = {});

  const Field& state() const { return u_; }
  double time() const { return step_count_ * dt_; }
  double dt() const { return dt_; }
  int output_every() const { return output_every_; }
  const SimulationStats& stats() const { return stats_; }

 private:
  void check_contamination();

  Model model_;
  SimulationOptions options_;
  Field u_, next_;
  double dt_;
  int output_every_;
  long step_count_ = 0;
  // Stencil weights: u_new = c u + wE uE + wW uW + wN uN + wS uS + dt r f0(t, u).
  std::vector<double> center_, east_, west_, north_, south_, reaction_;
  SimulationStats stats_;
};

struct RunResult {
  Field u;
  double t = 0.0;
  SimulationStats stats;
};

/// One-shot run; the step is the largest monotone dt that divides T when
/// options.dt is 0.
RunResult run(const Model& model, const Field& u0, double T,
              const std::vector<Observer*>& observers = {}, const SimulationOptions& options = {});

double step_for(const Model& model, const GridSpec& grid, double T, const SimulationOptions& options);

// ----------------------------------------------------------- diagnostics

/// max over output times and nodes of u_low - u_high (both runs share dt).
double comparison_check(const Model& model, const Field& u0_low, const Field& u0_high, double T,
                        const SimulationOptions& options = {});

/// True when the model is exactly a 1D problem along e.
bool reducible_along(const Model& model, Vec2 e);

struct FrontRunOptions {
  double spacing = 0.05;
  double half_width = 0.0;  // 0: sized from the expected travel distance
  double speed_guess = 2.5; // used only to size the box
  double eta = 0.5;
  double fit_fraction = 0.5;
};

struct FrontSpeed {
  double speed = 0.0;
  InterfaceTrack track;
  GridSpec grid;
  SimulationStats stats;
};

/// Speed of the eta-interface from the smoothed step datum (1 behind the
/// front, Dirichlet 1 on the trailing side).
FrontSpeed front_like_speed(const Model& model, Vec2 e, double T, const FrontRunOptions& options = {});

struct SpreadingReport {
  double inside_min = 1.0;
  double outside_max = 0.0;
  std::size_t inside_points = 0;
  std::size_t outside_points = 0;
  bool inside_pass = false;
  bool outside_pass = false;
  bool passed() const { return inside_pass && outside_pass; }
};

/// Checks min u(T, xT) >= eta_hi over x in (1 - eps) W and max u(T, xT) <= eta_lo
/// over box points with x outside (1 + eps) W. Throws ModelError when (1 - eps) W T
/// leaves the box or no box point lies outside (1 + eps) W T.
SpreadingReport verify_spreading_set(const Field& u, double T, const WulffShape& shape, double eps,
                                     double eta_hi = 0.9, double eta_lo = 0.05);

struct ApSpeeds {
  double front_speed = 0.0;
  std::optional<double> bump_speed;  // nullopt: the bump did not invade
  std::string outcome;
  InterfaceTrack front_track;
  InterfaceTrack bump_track;
};

struct ApRunOptions {
  double spacing = 0.1;
  double bump_radius = 5.0;
  double fit_fraction = 0.5;
};

/// Front-like and compact-bump average interface speeds for a 1D run.
ApSpeeds ap_average_speed(const Model& model, double T, const ApRunOptions& options = {});

}  // namespace wulffspread
