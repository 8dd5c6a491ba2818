#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wulffspread/model.hpp"

namespace wulffspread {

enum class SpeedSource { eigenvalue, wave_bvp, measured_front, synthetic };

std::string_view to_string(SpeedSource source);

// c*(e) sampled on directions e = (cos a, sin a). In 1D the two directions
// +1 and -1 are stored as the angles 0 and pi.
struct DirectionalSpeedTable {
  int dim = 2;
  std::vector<double> angles;
  std::vector<double> speeds;
  SpeedSource source = SpeedSource::synthetic;

  std::size_t size() const { return angles.size(); }
  Vec2 direction(std::size_t i) const;
  /// Linear interpolation in angle, periodic over [0, 2 pi).
  double speed_at(double angle) const;
  double min_speed() const;
  double max_speed() const;

  /// Throws ModelError when a speed is not positive or the angles do not
  /// cover the circle with gaps of at most 2 pi / 64.
  void validate() const;

  /// Equally spaced angles k * 2 pi / count; in 1D the pair {+1, -1}.
  static DirectionalSpeedTable tabulate(int dim, int count, const std::function<double(Vec2)>& speed,
                                        SpeedSource source);
};

struct SpreadingSpeed {
  double w = 0.0;
  double minimizer_angle = 0.0;
  Vec2 minimizer = {1.0, 0.0};
};

struct WulffOptions {
  int xi_samples = 720;
  double angular_tolerance = 1e-4;
};

/// w(xi) = min over e with e.xi > 0 of c*(e) / (e.xi).
SpreadingSpeed spreading_speed(const DirectionalSpeedTable& table, Vec2 xi,
                               const WulffOptions& options = {});

struct WulffShape {
  int dim = 2;
  std::vector<double> xi_angles;
  std::vector<double> radii;
  std::vector<double> minimizer_angles;
  std::vector<Vec2> vertices;  // w(xi) xi, counter-clockwise
  std::string interpolation = "linear in angle";

  /// Radial function at an arbitrary direction, linear between samples.
  double radius_at(double angle) const;
  double radius_along(Vec2 direction) const;
  double min_radius() const;
  double max_radius() const;
  /// Same shape with every radius multiplied by s.
  WulffShape scaled(double s) const;
};

WulffShape build_wulff(const DirectionalSpeedTable& table, const WulffOptions& options = {});

/// Radius-r circle (2D) or [-r, r] (1D), for synthetic comparisons.
WulffShape circle_shape(int dim, double radius, int samples = 720);

struct NormalPropertyReport {
  double max_violation = 0.0;  // relative excess over c*(e_xi) (1 + 1e-6)
  double worst_xi = 0.0;
  double worst_xi_prime = 0.0;
  bool passed(double tolerance) const { return max_violation <= tolerance; }
};

/// Supporting-hyperplane check w(xi') (xi'.e_xi) <= c*(e_xi) (1 + 1e-6).
NormalPropertyReport check_normal_property(const WulffShape& shape,
                                           const DirectionalSpeedTable& table);

struct ContinuityReport {
  double max_slope = 0.0;  // max |w(xi) - w(xi')| / |xi - xi'| over neighbours
  double constant = 0.0;   // 2 (cbar sqrt(dim) + 1)^2 max c / (min c)^2
  bool passed = false;
};

ContinuityReport check_continuity(const WulffShape& shape, const DirectionalSpeedTable& table);

enum class Region { inside, boundary_band, outside };

std::string_view to_string(Region region);

/// inside: |x| <= (1 - margin) w; outside: |x| >= (1 + margin) w.
Region point_classification(const WulffShape& shape, Vec2 x, double margin);

void write_polygon_csv(const WulffShape& shape, const std::string& path);
void write_polygon_svg(const WulffShape& shape, const std::string& path);

}  // namespace wulffspread
