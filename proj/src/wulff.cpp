#include "wulffspread/wulff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "wulffspread/parallel.hpp"

namespace wulffspread {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAdmissible = 1e-9;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

// Linear interpolation of periodic samples (angles ascending in [0, 2 pi)).
double periodic_interpolate(const std::vector<double>& angles, const std::vector<double>& values,
                            double angle) {
  const std::size_t n = angles.size();
  if (n == 1) return values[0];
  angle = wrap_angle(angle);
  auto upper = std::upper_bound(angles.begin(), angles.end(), angle);
  std::size_t hi = static_cast<std::size_t>(upper - angles.begin()) % n;
  std::size_t lo = (hi + n - 1) % n;
  double a_lo = angles[lo], a_hi = angles[hi];
  if (a_hi <= a_lo) a_hi += kTwoPi;
  double a = angle < a_lo ? angle + kTwoPi : angle;
  double t = (a - a_lo) / (a_hi - a_lo);
  return (1.0 - t) * values[lo] + t * values[hi];
}

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw ModelError("wulff: dimension must be 1 or 2");
}

}  // namespace

std::string_view to_string(SpeedSource source) {
  switch (source) {
    case SpeedSource::eigenvalue: return "eigenvalue";
    case SpeedSource::wave_bvp: return "wave_bvp";
    case SpeedSource::measured_front: return "measured_front";
    case SpeedSource::synthetic: return "synthetic";
  }
  return "unknown";
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::inside: return "inside";
    case Region::boundary_band: return "boundary-band";
    case Region::outside: return "outside";
  }
  return "unknown";
}

// ------------------------------------------------------------- speed table

Vec2 DirectionalSpeedTable::direction(std::size_t i) const {
  if (dim == 1) return {std::cos(angles[i]) >= 0.0 ? 1.0 : -1.0, 0.0};
  return {std::cos(angles[i]), std::sin(angles[i])};
}

double DirectionalSpeedTable::speed_at(double angle) const {
  if (dim == 1) return std::cos(angle) >= 0.0 ? speeds[0] : speeds[1];
  return periodic_interpolate(angles, speeds, angle);
}

double DirectionalSpeedTable::min_speed() const {
  return *std::min_element(speeds.begin(), speeds.end());
}

double DirectionalSpeedTable::max_speed() const {
  return *std::max_element(speeds.begin(), speeds.end());
}

void DirectionalSpeedTable::validate() const {
  check_dim(dim);
  if (angles.size() != speeds.size() || angles.empty())
    throw ModelError("speed table: angle and speed lists differ in length or are empty");
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    if (!(speeds[i] > 0.0) || !std::isfinite(speeds[i])) {
      std::ostringstream os;
      os << "speed table: speed " << speeds[i] << " at angle " << angles[i] << " is not positive";
      throw ModelError(os.str());
    }
  }
  if (dim == 1) {
    if (angles.size() != 2 || std::cos(angles[0]) < 0.5 || std::cos(angles[1]) > -0.5)
      throw ModelError("speed table: 1D tables hold the directions +1 and -1");
    return;
  }
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (angles[i] < 0.0 || angles[i] >= kTwoPi)
      throw ModelError("speed table: angles must lie in [0, 2 pi)");
    if (i > 0 && !(angles[i] > angles[i - 1]))
      throw ModelError("speed table: angles must be strictly increasing");
  }
  const double max_gap = kTwoPi / 64.0 + 1e-12;
  double wrap_gap = angles.front() + kTwoPi - angles.back();
  bool gap_ok = wrap_gap <= max_gap;
  for (std::size_t i = 1; i < angles.size(); ++i) gap_ok = gap_ok && angles[i] - angles[i - 1] <= max_gap;
  if (!gap_ok) throw ModelError("speed table: angular gap exceeds 2 pi / 64");
}

DirectionalSpeedTable DirectionalSpeedTable::tabulate(int dim, int count,
                                                      const std::function<double(Vec2)>& speed,
                                                      SpeedSource source) {
  check_dim(dim);
  DirectionalSpeedTable table;
  table.dim = dim;
  table.source = source;
  if (dim == 1) {
    table.angles = {0.0, std::numbers::pi};
  } else {
    if (count < 64) throw ModelError("speed table: at least 64 directions are required in 2D");
    table.angles.resize(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) table.angles[static_cast<std::size_t>(k)] = kTwoPi * k / count;
  }
  table.speeds.assign(table.angles.size(), 0.0);
  parallel_for(table.angles.size(), [&](std::size_t i) { table.speeds[i] = speed(table.direction(i)); });
  table.validate();
  return table;
}

// --------------------------------------------------------- spreading speed

SpreadingSpeed spreading_speed(const DirectionalSpeedTable& table, Vec2 xi,
                               const WulffOptions& options) {
  double norm = std::hypot(xi[0], xi[1]);
  if (!(norm > 0.0)) throw ModelError("spreading speed: direction must be nonzero");
  xi = {xi[0] / norm, xi[1] / norm};
  const double phi = std::atan2(xi[1], xi[0]);

  SpreadingSpeed best;
  best.w = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    double d = std::cos(table.angles[i] - phi);
    if (d <= kAdmissible) continue;
    double value = table.speeds[i] / d;
    if (value < best.w) {
      best.w = value;
      best.minimizer_angle = table.angles[i];
      arg = i;
    }
  }
  if (!std::isfinite(best.w))
    throw NumericalError("spreading speed: no table direction has e.xi > 0 (corrupted table)");

  if (table.dim == 2 && table.size() > 2) {
    auto objective = [&](double a) {
      double d = std::cos(a - phi);
      return d > kAdmissible ? table.speed_at(a) / d : std::numeric_limits<double>::infinity();
    };
    const std::size_t n = table.size();
    double lo = table.angles[(arg + n - 1) % n], hi = table.angles[(arg + 1) % n];
    double center = table.angles[arg];
    // Unwrap the neighbours around the discrete argmin.
    while (lo > center) lo -= kTwoPi;
    while (hi < center) hi += kTwoPi;
    // Keep the bracket inside the admissible half circle around xi.
    double phi_near = phi + kTwoPi * std::round((center - phi) / kTwoPi);
    const double reach = 0.5 * std::numbers::pi - 1e-6;
    lo = std::max(lo, phi_near - reach);
    hi = std::min(hi, phi_near + reach);

    const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_golden * (hi - lo), x2 = lo + inv_golden * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    while (hi - lo > options.angular_tolerance) {
      if (f1 <= f2) {
        hi = x2, x2 = x1, f2 = f1;
        x1 = hi - inv_golden * (hi - lo);
        f1 = objective(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2;
        x2 = lo + inv_golden * (hi - lo);
        f2 = objective(x2);
      }
    }
    double x = f1 <= f2 ? x1 : x2, f = std::min(f1, f2);
    if (f < best.w) {
      best.w = f;
      best.minimizer_angle = wrap_angle(x);
    }
  }
  best.minimizer = {std::cos(best.minimizer_angle), std::sin(best.minimizer_angle)};
  if (table.dim == 1) best.minimizer[1] = 0.0;
  return best;
}

// ------------------------------------------------------------ Wulff shape

double WulffShape::radius_at(double angle) const {
  if (dim == 1) return std::cos(angle) >= 0.0 ? radii[0] : radii[1];
  return periodic_interpolate(xi_angles, radii, angle);
}

double WulffShape::radius_along(Vec2 direction) const {
  return radius_at(std::atan2(direction[1], direction[0]));
}

double WulffShape::min_radius() const { return *std::min_element(radii.begin(), radii.end()); }
double WulffShape::max_radius() const { return *std::max_element(radii.begin(), radii.end()); }

WulffShape WulffShape::scaled(double s) const {
  WulffShape out = *this;
  for (double& r : out.radii) r *= s;
  for (Vec2& v : out.vertices) v = {v[0] * s, v[1] * s};
  return out;
}

WulffShape build_wulff(const DirectionalSpeedTable& table, const WulffOptions& options) {
  table.validate();
  WulffShape shape;
  shape.dim = table.dim;
  if (table.dim == 1) {
    shape.xi_angles = {0.0, std::numbers::pi};
  } else {
    if (options.xi_samples < 8) throw ModelError("wulff: too few xi samples");
    shape.xi_angles.resize(static_cast<std::size_t>(options.xi_samples));
    for (int k = 0; k < options.xi_samples; ++k)
      shape.xi_angles[static_cast<std::size_t>(k)] = kTwoPi * k / options.xi_samples;
  }
  const std::size_t n = shape.xi_angles.size();
  shape.radii.resize(n);
  shape.minimizer_angles.resize(n);
  shape.vertices.resize(n);
  parallel_for(n, [&](std::size_t i) {
    double a = shape.xi_angles[i];
    Vec2 xi = {std::cos(a), table.dim == 1 ? 0.0 : std::sin(a)};
    if (table.dim == 1) xi[0] = i == 0 ? 1.0 : -1.0;
    SpreadingSpeed s = spreading_speed(table, xi, options);
    shape.radii[i] = s.w;
    shape.minimizer_angles[i] = s.minimizer_angle;
    shape.vertices[i] = {s.w * xi[0], s.w * xi[1]};
  });
  return shape;
}

WulffShape circle_shape(int dim, double radius, int samples) {
  check_dim(dim);
  WulffShape shape;
  shape.dim = dim;
  if (dim == 1) {
    shape.xi_angles = {0.0, std::numbers::pi};
  } else {
    for (int k = 0; k < samples; ++k) shape.xi_angles.push_back(kTwoPi * k / samples);
  }
  for (double a : shape.xi_angles) {
    Vec2 xi = dim == 1 ? Vec2{a == 0.0 ? 1.0 : -1.0, 0.0} : Vec2{std::cos(a), std::sin(a)};
    shape.radii.push_back(radius);
    shape.minimizer_angles.push_back(a);
    shape.vertices.push_back({radius * xi[0], radius * xi[1]});
  }
  shape.interpolation = "exact circle";
  return shape;
}

// ------------------------------------------------------------------ checks

NormalPropertyReport check_normal_property(const WulffShape& shape,
                                           const DirectionalSpeedTable& table) {
  NormalPropertyReport report;
  const std::size_t n = shape.xi_angles.size();
  for (std::size_t i = 0; i < n; ++i) {
    double e = shape.minimizer_angles[i];
    double bound = table.speed_at(e) * (1.0 + 1e-6);
    for (std::size_t j = 0; j < n; ++j) {
      double lhs = shape.radii[j] * std::cos(shape.xi_angles[j] - e);
      double violation = lhs / bound - 1.0;
      if (violation > report.max_violation) {
        report.max_violation = violation;
        report.worst_xi = shape.xi_angles[i];
        report.worst_xi_prime = shape.xi_angles[j];
      }
    }
  }
  return report;
}

ContinuityReport check_continuity(const WulffShape& shape, const DirectionalSpeedTable& table) {
  ContinuityReport report;
  double cbar = table.max_speed(), cmin = table.min_speed();
  double root_dim = std::sqrt(static_cast<double>(shape.dim));
  report.constant = 2.0 * std::pow(cbar * root_dim + 1.0, 2) * cbar / (cmin * cmin);
  report.passed = true;
  const std::size_t n = shape.xi_angles.size();
  if (shape.dim == 1 || n < 2) return report;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    double gap = wrap_angle(shape.xi_angles[j] - shape.xi_angles[i]);
    double chord = 2.0 * std::sin(0.5 * gap);
    double jump = std::abs(shape.radii[j] - shape.radii[i]);
    report.max_slope = std::max(report.max_slope, jump / chord);
    if (jump > report.constant * chord + 1e-6) report.passed = false;
  }
  return report;
}

Region point_classification(const WulffShape& shape, Vec2 x, double margin) {
  double r = std::hypot(x[0], x[1]);
  if (r == 0.0) return Region::inside;
  double w = shape.radius_along(x);
  if (r <= (1.0 - margin) * w) return Region::inside;
  if (r >= (1.0 + margin) * w) return Region::outside;
  return Region::boundary_band;
}

// ------------------------------------------------------------------ export

void write_polygon_csv(const WulffShape& shape, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(12);
  out << "angle,radius,x,y\n";
  for (std::size_t i = 0; i < shape.xi_angles.size(); ++i)
    out << shape.xi_angles[i] << ',' << shape.radii[i] << ',' << shape.vertices[i][0] << ','
        << shape.vertices[i][1] << '\n';
}

void write_polygon_svg(const WulffShape& shape, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  double extent = 1.1 * shape.max_radius();
  out.precision(8);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -extent << ' ' << -extent << ' '
      << 2 * extent << ' ' << 2 * extent << "\" width=\"400\" height=\"400\">\n";
  out << "  <line x1=\"" << -extent << "\" y1=\"0\" x2=\"" << extent
      << "\" y2=\"0\" stroke=\"#bbb\" stroke-width=\"" << extent / 200 << "\"/>\n";
  out << "  <line x1=\"0\" y1=\"" << -extent << "\" x2=\"0\" y2=\"" << extent
      << "\" stroke=\"#bbb\" stroke-width=\"" << extent / 200 << "\"/>\n";
  out << "  <path d=\"";
  for (std::size_t i = 0; i < shape.vertices.size(); ++i)
    out << (i == 0 ? 'M' : 'L') << shape.vertices[i][0] << ',' << -shape.vertices[i][1] << ' ';
  out << "Z\" fill=\"none\" stroke=\"black\" stroke-width=\"" << extent / 150 << "\"/>\n</svg>\n";
}

}  // namespace wulffspread
