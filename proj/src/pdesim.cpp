#include "wulffspread/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "wulffspread/parallel.hpp"

namespace wulffspread {

namespace {

// Values this far outside [0, 1] would have needed clamping.
constexpr double kRangeSlack = 1e-12;

Vec2 unit(Vec2 e) {
  double n = std::hypot(e[0], e[1]);
  if (!(n > 0.0)) throw ModelError("direction must be nonzero");
  return {e[0] / n, e[1] / n};
}

double a_max_of(const CoefficientSpec& c) { return c.diffusion + std::abs(c.diffusion_amplitude); }
double a_min_of(const CoefficientSpec& c) { return c.diffusion - std::abs(c.diffusion_amplitude); }

}  // namespace

// ------------------------------------------------------------------- Field

Field::Field(const GridSpec& g, double value) : grid(g) {
  grid.validate();
  data.assign(grid.node_count(), value);
}

Vec2 Field::point(int i, int j) const {
  return {grid.coordinate(i), grid.dim == 2 ? grid.coordinate(j) : 0.0};
}

std::optional<double> Field::sample(Vec2 x) const {
  const double h = grid.spacing();
  const double L = grid.domain_half_width;
  auto locate = [&](double c, int& i, double& t) {
    double s = (c + L) / h;
    int last = nx() - 1;
    if (s < -1e-9 || s > last + 1e-9) return false;
    s = std::clamp(s, 0.0, static_cast<double>(last));
    i = std::min(static_cast<int>(s), last - 1);
    t = s - i;
    return true;
  };
  int i = 0, j = 0;
  double tx = 0.0, ty = 0.0;
  if (!locate(x[0], i, tx)) return std::nullopt;
  if (grid.dim == 1) return (1.0 - tx) * at(i) + tx * at(i + 1);
  if (!locate(x[1], j, ty)) return std::nullopt;
  return (1.0 - tx) * (1.0 - ty) * at(i, j) + tx * (1.0 - ty) * at(i + 1, j) +
         (1.0 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
}

double Field::min() const { return *std::min_element(data.begin(), data.end()); }
double Field::max() const { return *std::max_element(data.begin(), data.end()); }

Field Field::from_function(const GridSpec& g, const std::function<double(Vec2)>& u0) {
  Field f(g);
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i) f.at(i, j) = u0(f.point(i, j));
  return f;
}

// ------------------------------------------------------------ initial data

std::function<double(Vec2)> bump_datum(double radius, double height, double ramp) {
  return [=](Vec2 x) {
    double r = std::hypot(x[0], x[1]);
    if (r <= radius) return height;
    if (r >= radius + ramp) return 0.0;
    return height * 0.5 * (1.0 + std::cos(std::numbers::pi * (r - radius) / ramp));
  };
}

std::function<double(Vec2)> front_like_datum(Vec2 e) {
  e = unit(e);
  return [=](Vec2 x) {
    double s = x[0] * e[0] + x[1] * e[1];
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * s));
  };
}

// -------------------------------------------------------------- observers

std::optional<double> level_position(const Field& u, Vec2 e, double eta) {
  e = unit(e);
  const GridSpec& g = u.grid;
  const double h = g.spacing();
  if (g.dim == 1) {
    int n = u.nx();
    int origin = static_cast<int>(std::lround(g.domain_half_width / h));
    int dir = e[0] >= 0.0 ? 1 : -1;
    int far = dir > 0 ? n - 1 : 0;
    if (u.at(far) >= eta) return std::nullopt;
    for (int i = far - dir; dir > 0 ? i >= origin : i <= origin; i -= dir) {
      double ui = u.at(i);
      if (ui >= eta) {
        double un = u.at(i + dir);
        return dir * g.coordinate(i) + h * (ui - eta) / (ui - un);
      }
    }
    return std::nullopt;
  }
  // 2D: bilinear samples every h/2 along the ray up to the box edge.
  double reach = g.domain_half_width / std::max(std::abs(e[0]), std::abs(e[1]));
  double ds = 0.5 * h;
  int samples = static_cast<int>(std::floor(reach / ds));
  auto value = [&](int k) {
    double s = k * ds;
    return u.sample({s * e[0], s * e[1]}).value_or(0.0);
  };
  double next = value(samples);
  if (next >= eta) return std::nullopt;
  for (int k = samples - 1; k >= 0; --k) {
    double v = value(k);
    if (v >= eta) return k * ds + ds * (v - eta) / (v - next);
    next = v;
  }
  return std::nullopt;
}

LinearFit fit_tail(const std::vector<double>& t, const std::vector<std::optional<double>>& x,
                   double fraction) {
  LinearFit fit;
  if (t.empty()) return fit;
  double start = t.front() + fraction * (t.back() - t.front());
  double st = 0, sx = 0, stt = 0, stx = 0;
  int n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < start - 1e-12 || !x[k]) continue;
    st += t[k], sx += *x[k], stt += t[k] * t[k], stx += t[k] * *x[k];
    ++n;
  }
  fit.points = n;
  if (n < 2) return fit;
  double mt = st / n, mx = sx / n;
  double var = stt / n - mt * mt;
  if (!(var > 0.0)) return fit;
  fit.slope = (stx / n - mt * mx) / var;
  fit.intercept = mx - fit.slope * mt;
  double ss = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < start - 1e-12 || !x[k]) continue;
    double r = *x[k] - (fit.intercept + fit.slope * t[k]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

void InterfaceTrack::fit(double fraction) {
  LinearFit f = fit_tail(times, positions, fraction);
  fit_speed = f.slope;
  fit_residual = f.residual;
  fit_points = f.points;
}

InterfaceObserver::InterfaceObserver(Vec2 e, double eta) {
  track_.e = unit(e);
  track_.eta = eta;
}

void InterfaceObserver::observe(const Snapshot& s) {
  track_.times.push_back(s.t);
  track_.positions.push_back(level_position(s.u, track_.e, track_.eta));
}

InterfaceTrack InterfaceObserver::track() const {
  InterfaceTrack t = track_;
  t.fit();
  return t;
}

std::optional<double> RadiusCurve::terminal_average_speed() const {
  if (times.empty() || !radii.back() || !(times.back() > 0.0)) return std::nullopt;
  return *radii.back() / times.back();
}

RadiusObserver::RadiusObserver(std::vector<Vec2> directions, double eta) {
  for (Vec2 xi : directions) {
    RadiusCurve c;
    c.eta = eta;
    c.xi = unit(xi);
    curves_.push_back(c);
  }
}

void RadiusObserver::observe(const Snapshot& s) {
  for (auto& c : curves_) {
    c.times.push_back(s.t);
    c.radii.push_back(level_position(s.u, c.xi, c.eta));
  }
}

void SnapshotObserver::observe(const Snapshot& s) {
  if (seen_++ % every_ != 0) return;
  times_.push_back(s.t);
  fields_.push_back(s.u);
}

void MonotonicityObserver::observe(const Snapshot& s) {
  if (!previous_.empty()) {
    for (std::size_t k = 0; k < previous_.size(); ++k)
      min_increment_ = std::min(min_increment_, s.u.data[k] - previous_[k]);
  }
  previous_ = s.u.data;
}

// -------------------------------------------------------------- simulator

double monotone_dt_bound(const Model& model, const GridSpec& grid, Vec2) {
  const double h = grid.spacing();
  const double dim = grid.dim;
  const CoefficientSpec& c = model.coefficients;
  double q_max = grid.dim == 2 ? std::abs(c.shear_amplitude) : 0.0;
  double rate = 2.0 * dim * a_max_of(c) / (h * h) + dim * q_max / h + model.reaction.lipschitz();
  return 1.0 / rate;
}

Simulator::Simulator(const Model& model, Field u0, double dt, const SimulationOptions& options)
    : model_(model), options_(options), u_(std::move(u0)), dt_(dt) {
  const GridSpec& g = u_.grid;
  g.validate();
  if (g.periodic_box != (options_.boundary.kind == BoundaryKind::periodic))
    throw ModelError("simulator: periodic boundary requires a periodic grid and vice versa");
  if (!(dt_ > 0.0)) throw ModelError("simulator: dt must be positive");
  double bound = monotone_dt_bound(model_, g, options_.ray_direction);
  if (dt_ > bound * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "simulator: dt = " << dt_ << " violates the monotonicity (CFL) bound " << bound;
    throw ModelError(os.str());
  }
  const CoefficientSpec& cs = model_.coefficients;
  if (a_min_of(cs) <= 0.0) throw ModelError("simulator: diffusion must be uniformly positive");
  const double h = g.spacing();
  if (g.dim == 2 && std::abs(cs.shear_amplitude) * h > 2.0 * a_min_of(cs))
    throw ModelError("simulator: cell Peclet number above 1, central advection is not monotone");
  if (u_.min() < 0.0 || u_.max() > 1.0) throw ModelError("simulator: u0 must take values in [0, 1]");

  output_every_ = options_.output_every > 0
                      ? options_.output_every
                      : std::max(1, static_cast<int>(std::lround(0.1 / dt_)));

  const Vec2 ray = unit(options_.ray_direction);
  auto physical = [&](Vec2 p) -> Vec2 {
    return g.dim == 1 ? Vec2{p[0] * ray[0], p[0] * ray[1]} : p;
  };
  const std::size_t n = u_.data.size();
  center_.assign(n, 0.0);
  east_.assign(n, 0.0);
  west_.assign(n, 0.0);
  north_.assign(n, 0.0);
  south_.assign(n, 0.0);
  reaction_.assign(n, 0.0);
  const double ih2 = 1.0 / (h * h), i2h = 0.5 / h;
  const double lipschitz = model_.reaction.lipschitz();
  for (int j = 0; j < u_.ny(); ++j) {
    for (int i = 0; i < u_.nx(); ++i) {
      std::size_t k = u_.index(i, j);
      Vec2 p = u_.point(i, j);
      Vec2 x = physical(p);
      auto a_at = [&](double dx, double dy, int comp) {
        return cs.diffusion_at(physical({p[0] + dx, p[1] + dy}))[comp];
      };
      double a0 = cs.diffusion_at(x)[0];
      double ae = 0.5 * (a0 + a_at(h, 0, 0)), aw = 0.5 * (a0 + a_at(-h, 0, 0));
      Vec2 q = cs.advection_at(x, g.dim);
      double q1 = g.dim == 1 ? q[0] * ray[0] + q[1] * ray[1] : q[0];
      east_[k] = dt_ * (ae * ih2 + q1 * i2h);
      west_[k] = dt_ * (aw * ih2 - q1 * i2h);
      double diag = ae + aw;
      if (g.dim == 2) {
        double b0 = cs.diffusion_at(x)[2];
        double an = 0.5 * (b0 + a_at(0, h, 2)), as = 0.5 * (b0 + a_at(0, -h, 2));
        north_[k] = dt_ * (an * ih2 + q[1] * i2h);
        south_[k] = dt_ * (as * ih2 - q[1] * i2h);
        diag += an + as;
      }
      center_[k] = 1.0 - dt_ * diag * ih2;
      reaction_[k] = dt_ * model_.reaction.spatial_factor(x);
      if (east_[k] < 0 || west_[k] < 0 || north_[k] < 0 || south_[k] < 0 ||
          center_[k] - dt_ * lipschitz < 0)
        throw ModelError("simulator: stencil weights are not monotone at this dt");
    }
  }

  if (options_.boundary.kind == BoundaryKind::dirichlet) {
    const Boundary& b = options_.boundary;
    int nx = u_.nx(), ny = u_.ny();
    for (int j = 0; j < ny; ++j) {
      u_.at(0, j) = b.left;
      u_.at(nx - 1, j) = b.right;
    }
    if (g.dim == 2) {
      for (int i = 1; i < nx - 1; ++i) {
        u_.at(i, 0) = b.bottom;
        u_.at(i, ny - 1) = b.top;
      }
    }
  }
  next_ = u_;
  stats_.dt = dt_;
  stats_.min_value = u_.min();
  stats_.max_value = u_.max();
}

namespace {

struct Stencil {
  const double *center, *east, *west, *north, *south, *reaction;
  int nx, ny;
  bool periodic, two_d;
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

// One explicit Euler sweep; f0 is the u-profile of the reaction at the
// current time, inlined per reaction kind.
template <class Kinetics>
Range sweep(const Stencil& s, const double* u, double* out, Kinetics f0) {
  const int nx = s.nx, ny = s.ny;
  const int j_begin = s.two_d && !s.periodic ? 1 : 0;
  const int j_end = s.two_d && !s.periodic ? ny - 1 : ny;
  const int i_begin = s.periodic ? 0 : 1;
  const int i_end = s.periodic ? nx : nx - 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

#pragma omp parallel for reduction(min : lo) reduction(max : hi) num_threads(worker_count()) \
    schedule(static)
  for (int j = j_begin; j < j_end; ++j) {
    const std::size_t row = static_cast<std::size_t>(nx) * j;
    const std::size_t up = s.two_d ? static_cast<std::size_t>(nx) * (j + 1 == ny ? 0 : j + 1) : 0;
    const std::size_t down = s.two_d ? static_cast<std::size_t>(nx) * (j == 0 ? ny - 1 : j - 1) : 0;
    for (int i = i_begin; i < i_end; ++i) {
      const int ie = i + 1 == nx ? 0 : i + 1;
      const int iw = i == 0 ? nx - 1 : i - 1;
      const std::size_t k = row + i;
      const double v = u[k];
      double value = s.center[k] * v + s.east[k] * u[row + ie] + s.west[k] * u[row + iw];
      if (s.two_d) value += s.north[k] * u[up + i] + s.south[k] * u[down + i];
      if (v > 0.0 && v < 1.0) value += s.reaction[k] * f0(v);
      out[k] = value;
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
  }
  return {lo, hi};
}

}  // namespace

void Simulator::step() {
  const double t = time();
  const ReactionTerm& f = model_.reaction;
  Stencil s{center_.data(), east_.data(), west_.data(), north_.data(), south_.data(),
            reaction_.data(), u_.nx(), u_.ny(),
            options_.boundary.kind == BoundaryKind::periodic, u_.grid.dim == 2};
  const double* u = u_.data.data();
  double* out = next_.data.data();

  // Same formulas as ReactionTerm::profile on (0, 1), with theta(t) frozen
  // for the step.
  Range r;
  switch (f.kind) {
    case ReactionKind::kpp:
      r = sweep(s, u, out, [](double v) { return v * (1.0 - v); });
      break;
    case ReactionKind::monostable:
      r = sweep(s, u, out, [](double v) { return v * (1.0 - v) * v; });
      break;
    case ReactionKind::combustion: {
      const double th = f.theta;
      r = sweep(s, u, out, [th](double v) { return v > th ? (v - th) * (1.0 - v) : 0.0; });
      break;
    }
    case ReactionKind::bistable:
    case ReactionKind::ap_time: {
      const double th = f.kind == ReactionKind::ap_time ? f.theta_at(t) : f.theta;
      r = sweep(s, u, out, [th](double v) { return v * (1.0 - v) * (v - th); });
      break;
    }
    case ReactionKind::multistable: {
      const std::vector<double>& zeros = f.zeros;
      r = sweep(s, u, out, [&zeros](double v) {
        double g = v * (1.0 - v);
        for (double z : zeros) g *= (v - z);
        return g;
      });
      break;
    }
  }

  if (!(r.lo >= -kRangeSlack && r.hi <= 1.0 + kRangeSlack)) {
    std::ostringstream os;
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi))
      os << "simulator: non-finite value at t = " << t;
    else
      os << "simulator: hard-clamp event at t = " << t << " (range [" << r.lo << ", " << r.hi
         << "] left [0, 1])";
    throw NumericalError(os.str());
  }
  std::swap(u_.data, next_.data);
  ++step_count_;
  stats_.steps = step_count_;
  stats_.min_value = std::min(stats_.min_value, r.lo);
  stats_.max_value = std::max(stats_.max_value, r.hi);
}

void Simulator::check_contamination() {
  if (options_.boundary.kind != BoundaryKind::dirichlet) return;
  const Boundary& b = options_.boundary;
  const int nx = u_.nx(), ny = u_.ny();
  double worst = 0.0;
  for (int j = 0; j < ny; ++j) {
    if (u_.grid.dim == 2 && (j == 0 || j == ny - 1)) continue;
    worst = std::max({worst, std::abs(u_.at(1, j) - b.left), std::abs(u_.at(nx - 2, j) - b.right)});
  }
  if (u_.grid.dim == 2) {
    for (int i = 1; i < nx - 1; ++i)
      worst = std::max({worst, std::abs(u_.at(i, 1) - b.bottom), std::abs(u_.at(i, ny - 2) - b.top)});
  }
  if (worst > 1e-6 && stats_.max_contamination <= 1e-6) {
    std::ostringstream os;
    os << "boundary contamination " << worst << " exceeds 1e-6 at t = " << time();
    stats_.warnings.push_back(os.str());
  }
  stats_.max_contamination = std::max(stats_.max_contamination, worst);
  if (worst > 1e-3 && options_.contamination_error) {
    std::ostringstream os;
    os << "simulator: boundary contamination " << worst << " exceeds 1e-3 at t = " << time()
       << "; enlarge the box";
    throw NumericalError(os.str());
  }
}

void Simulator::advance_to(double T, const std::vector<Observer*>& observers) {
  auto notify = [&] {
    check_contamination();
    Snapshot s{time(), step_count_, u_};
    for (Observer* o : observers) o->observe(s);
  };
  long last = std::lround(T / dt_);
  if (std::abs(last * dt_ - T) > 0.5 * dt_ + 1e-12 * T)
    throw ModelError("simulator: T is not reachable");
  notify();
  while (step_count_ < last) {
    step();
    if (step_count_ % output_every_ == 0 || step_count_ == last) notify();
  }
}

double step_for(const Model& model, const GridSpec& grid, double T, const SimulationOptions& options) {
  if (options.dt > 0.0) return options.dt;
  double bound = options.safety * monotone_dt_bound(model, grid, options.ray_direction);
  double steps = std::ceil(T / bound);
  return T / std::max(1.0, steps);
}

RunResult run(const Model& model, const Field& u0, double T, const std::vector<Observer*>& observers,
              const SimulationOptions& options) {
  Simulator sim(model, u0, step_for(model, u0.grid, T, options), options);
  sim.advance_to(T, observers);
  return {sim.state(), sim.time(), sim.stats()};
}

// ----------------------------------------------------------- diagnostics

double comparison_check(const Model& model, const Field& u0_low, const Field& u0_high, double T,
                        const SimulationOptions& options) {
  double dt = step_for(model, u0_low.grid, T, options);
  Simulator low(model, u0_low, dt, options), high(model, u0_high, dt, options);
  auto violation = [&] {
    double worst = -std::numeric_limits<double>::infinity();
    const auto& a = low.state().data;
    const auto& b = high.state().data;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, a[k] - b[k]);
    return worst;
  };
  double worst = violation();
  long steps = std::lround(T / dt);
  for (long s = 0; s < steps; ++s) {
    low.step();
    high.step();
    worst = std::max(worst, violation());
  }
  return std::max(worst, 0.0);
}

bool reducible_along(const Model& model, Vec2 e) {
  e = unit(e);
  if (model.spatially_homogeneous()) return true;
  bool x1_only = model.coefficients.depends_only_on_x1();
  return x1_only && std::abs(e[1]) < 1e-12;
}

FrontSpeed front_like_speed(const Model& model, Vec2 e, double T, const FrontRunOptions& options) {
  e = unit(e);
  if (!reducible_along(model, e))
    throw ModelError("front_like_speed: the model is not 1D-reducible along this direction");
  double L = options.half_width > 0.0 ? options.half_width : options.speed_guess * T + 20.0;
  FrontSpeed result;
  result.grid = GridSpec::box(1, L, options.spacing);
  SimulationOptions sim;
  sim.ray_direction = e;
  sim.boundary.left = 1.0;
  Field u0 = Field::from_function(result.grid, front_like_datum({1.0, 0.0}));
  InterfaceObserver tracker({1.0, 0.0}, options.eta);
  RunResult r = run(model, u0, T, {&tracker}, sim);
  result.track = tracker.track();
  result.track.e = e;
  result.track.fit(options.fit_fraction);
  result.speed = result.track.fit_speed;
  result.stats = r.stats;
  return result;
}

SpreadingReport verify_spreading_set(const Field& u, double T, const WulffShape& shape, double eps,
                                     double eta_hi, double eta_lo) {
  if (!(T > 0.0)) throw ModelError("verify: T must be positive");
  if (shape.dim != u.grid.dim) throw ModelError("verify: shape and field dimensions differ");
  const double L = u.grid.domain_half_width;
  for (std::size_t k = 0; k < shape.xi_angles.size(); ++k) {
    double a = shape.xi_angles[k];
    double box_reach = L / std::max(std::abs(std::cos(a)), std::abs(std::sin(a)));
    if (shape.dim == 1) box_reach = L;
    if ((1.0 - eps) * shape.radii[k] * T > box_reach)
      throw ModelError("verify: the box does not contain (1 - eps) W T");
  }
  SpreadingReport report;
  for (int j = 0; j < u.ny(); ++j) {
    for (int i = 0; i < u.nx(); ++i) {
      Vec2 y = u.point(i, j);
      Vec2 x = {y[0] / T, y[1] / T};
      Region region = point_classification(shape, x, eps);
      double v = u.at(i, j);
      if (region == Region::inside) {
        report.inside_min = std::min(report.inside_min, v);
        ++report.inside_points;
      } else if (region == Region::outside) {
        report.outside_max = std::max(report.outside_max, v);
        ++report.outside_points;
      }
    }
  }
  if (report.outside_points == 0)
    throw ModelError("verify: no box point lies outside (1 + eps) W T; enlarge the box");
  report.inside_pass = report.inside_min >= eta_hi;
  report.outside_pass = report.outside_max <= eta_lo;
  return report;
}

ApSpeeds ap_average_speed(const Model& model, double T, const ApRunOptions& options) {
  if (model.coefficients.homogeneous() == false || !model.reaction.spatially_homogeneous())
    throw ModelError("ap_average_speed: needs spatially homogeneous coefficients");
  ApSpeeds out;
  // |c| <= 1 / sqrt(2) for u (1 - u) (u - theta) with theta in [0, 1]; the
  // box allows speed 1.
  FrontRunOptions front;
  front.spacing = options.spacing;
  front.speed_guess = 1.0;
  front.fit_fraction = options.fit_fraction;
  FrontSpeed f = front_like_speed(model, {1.0, 0.0}, T, front);
  out.front_speed = f.speed;
  out.front_track = f.track;

  GridSpec g = GridSpec::box(1, options.bump_radius + T + 20.0, options.spacing);
  Field u0 = Field::from_function(g, bump_datum(options.bump_radius));
  InterfaceObserver tracker({1.0, 0.0}, 0.5);
  RunResult r = run(model, u0, T, {&tracker});
  out.bump_track = tracker.track();
  out.bump_track.fit(options.fit_fraction);
  bool alive = out.bump_track.positions.back().has_value() && r.u.max() >= 0.5;
  if (alive && out.bump_track.fit_speed > 0.0) {
    out.bump_speed = out.bump_track.fit_speed;
    out.outcome = "invasion";
  } else {
    out.outcome = "no invasion";
  }
  return out;
}

}  // namespace wulffspread
