#include "wulffspread/waves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "wulffspread/pdesim.hpp"
#include "wulffspread/terrace.hpp"

namespace wulffspread {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;
using EventFn = std::function<double(const State&)>;
using SampleFn = std::function<void(double, const State&)>;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Hit {
  int event = -1;  // -1: length exhausted, -2: non-finite state
  double x = 0.0;
  State s{};
};

// Integrates s' = rhs(s) from (x_start, s0) for at most `length`, stopping at
// the first event g_k(s) <= 0 (only events positive at the start can fire).
// sample(x, s) is called at every multiple of dx in (x_start, stop], and at
// x_start itself when include_start is set.
template <class Rhs>
Hit integrate(Rhs rhs, State s0, double x_start, double length, const std::vector<EventFn>& events,
              double tol, double dx = 0.0, const SampleFn& sample = {}, bool include_start = true) {
  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
  auto sys = [&](const State& s, State& ds, double) { rhs(s, ds); };
  stepper.initialize(s0, x_start, 1e-3);

  double next_sample = kInf;
  if (sample && dx > 0.0) {
    next_sample = std::floor(x_start / dx + 1e-9) * dx;
    if (next_sample < x_start - 1e-12 * dx || (next_sample <= x_start && !include_start))
      next_sample += dx;
  }
  std::vector<double> g_old(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) g_old[k] = events[k](s0);

  State tmp;
  const double x_end = x_start + length;
  while (true) {
    auto [a, b] = stepper.do_step(sys);
    const State sb = stepper.current_state();
    if (!std::isfinite(sb[0]) || !std::isfinite(sb[1])) return {-2, b, sb};

    int fired = -1;
    double x_hit = b;
    for (std::size_t k = 0; k < events.size(); ++k) {
      double gb = events[k](sb);
      if (gb <= 0.0 && g_old[k] > 0.0) {
        double lo = a, hi = b;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
          double mid = 0.5 * (lo + hi);
          stepper.calc_state(mid, tmp);
          (events[k](tmp) > 0.0 ? lo : hi) = mid;
        }
        if (hi < x_hit || fired < 0) {
          fired = static_cast<int>(k);
          x_hit = hi;
        }
      }
      g_old[k] = gb;
    }
    const double stop = std::min(x_hit, x_end);
    while (next_sample <= stop) {
      stepper.calc_state(next_sample, tmp);
      sample(next_sample, tmp);
      next_sample += dx;
    }
    if (fired >= 0 && x_hit <= x_end) {
      State at;
      stepper.calc_state(x_hit, at);
      return {fired, x_hit, at};
    }
    if (b >= x_end) {
      State at;
      stepper.calc_state(x_end, at);
      return {-1, x_end, at};
    }
  }
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Signs of f at interior samples of (lo, hi), exact zeros dropped and runs merged.
std::vector<int> sign_pattern(const Kinetics& f, double lo, double hi, int samples = 10000) {
  std::vector<int> pattern;
  for (int i = 1; i < samples; ++i) {
    int s = sign_of(f(lo + (hi - lo) * i / samples));
    if (s != 0 && (pattern.empty() || pattern.back() != s)) pattern.push_back(s);
  }
  return pattern;
}

struct Trajectory {
  bool overshoot = false;
  bool reached_gap = false;
  double lowest = 0.0;
  std::vector<double> x, phi, slope;
};

// Decreasing trajectory of phi'' + c phi' + f(phi) = 0 from theta_hi. Near
// theta_lo the state switches to (log d, w = phi' / d), d = phi - theta_lo,
// where crossing theta_lo shows up as w -> -infinity in finite x.
// With stop_gap > 0 the trajectory is sampled and ends once d <= stop_gap.
Trajectory trajectory(const Kinetics& f, double lo, double hi, double c, const ShootingOptions& o,
                      double tol, double stop_gap) {
  const bool sampling = stop_gap > 0.0;
  const double fp_hi = f.derivative(hi, lo, hi);
  if (!(fp_hi < 0.0)) throw NumericalError("shooting: theta_hi is not a stable zero of f");
  const double mu = 0.5 * (-c + std::sqrt(c * c - 4.0 * fp_hi));

  Trajectory t;
  SampleFn record;
  if (sampling) {
    record = [&](double x, const State& s) {
      t.x.push_back(x);
      t.phi.push_back(s[0]);
      t.slope.push_back(s[1]);
    };
  }

  const double d_switch = 1e-3 * (hi - lo);
  auto rhs1 = [&](const State& s, State& ds) {
    ds[0] = s[1];
    ds[1] = -c * s[1] - f(s[0]);
  };
  std::vector<EventFn> ev1 = {[](const State& s) { return -s[1]; },
                              [&](const State& s) { return (s[0] - lo) - d_switch; }};
  State s0 = {hi - o.offset, -o.offset * mu};
  Hit h1 = integrate(rhs1, s0, 0.0, o.max_length, ev1, tol, o.sample_spacing, record);
  if (h1.event == -2) throw NumericalError("shooting: non-finite trajectory");
  if (h1.event != 1) {
    // Turned back, or stalled for the whole window: stays above theta_lo.
    t.lowest = h1.s[0];
    return t;
  }

  const double d0 = h1.s[0] - lo;
  const double w0 = h1.s[1] / d0;
  if (!sampling) {
    bool flat = true;
    for (int k = 1; k <= 64 && flat; ++k) flat = f(lo + d0 * k / 64.0) == 0.0;
    if (flat) {
      // w' = -w (w + c) exactly: w stays above -c (stall) or escapes to -infinity.
      t.overshoot = !(c > 0.0) || w0 + c < 0.0;
      t.lowest = t.overshoot ? lo : lo + d0 * (1.0 + w0 / c);
      return t;
    }
  }

  auto g = [&](double d) { return f(lo + d) / d; };
  auto rhs2 = [&](const State& s, State& ds) {
    double d = std::exp(s[0]);
    ds[0] = s[1];
    ds[1] = -c * s[1] - g(d) - s[1] * s[1];
  };
  const double blow_up = 1e8 * (1.0 + std::abs(c));
  const double d_stop = sampling ? stop_gap : 1e-9 * std::max(1.0, hi - lo);
  const double log_stop = std::log(d_stop);
  std::vector<EventFn> ev2 = {[](const State& s) { return -s[1]; },
                              [&](const State& s) { return s[1] + blow_up; },
                              [&](const State& s) { return s[0] - log_stop; }};
  SampleFn record2;
  if (sampling) {
    record2 = [&](double x, const State& s) {
      double d = std::exp(s[0]);
      record(x, {lo + d, s[1] * d});
    };
  }
  Hit h2 = integrate(rhs2, {std::log(d0), w0}, h1.x, std::max(o.max_length - h1.x, 1.0), ev2, tol,
                     o.sample_spacing, record2, false);
  const double d = std::exp(h2.s[0]);
  if (h2.event == 0) {
    t.lowest = lo + d;
    return t;
  }
  if (h2.event == 1 || h2.event == -2) {
    t.overshoot = true;
    t.lowest = lo;
    return t;
  }
  if (sampling && h2.event == 2) {
    t.reached_gap = true;
    t.lowest = lo + d;
    return t;
  }
  // Frozen Riccati w' = -(w - r1)(w - r2): below r1 the slope escapes to -infinity.
  double gd = g(d);
  double disc = c * c - 4.0 * gd;
  if (disc < 0.0) {
    t.overshoot = true;
    t.lowest = lo;
    return t;
  }
  double r1 = 0.5 * (-c - std::sqrt(disc));
  t.overshoot = h2.s[1] < r1;
  t.lowest = t.overshoot ? lo : lo + d;
  return t;
}

double bisect_speed(const Kinetics& f, double lo, double hi, const ShootingOptions& o, double a,
                    double b, double width, double tol) {
  auto over = [&](double c) { return trajectory(f, lo, hi, c, o, tol, 0.0).overshoot; };
  if (!(a < b)) b = a + 1.0;
  while (!over(a)) {
    b = a;
    a -= std::max(1.0, std::abs(a));
    if (a < -o.max_speed) throw NumericalError("shooting: bracket expansion failed below -max_speed");
  }
  while (over(b)) {
    a = b;
    b += std::max(1.0, std::abs(b));
    if (b > o.max_speed) throw NumericalError("shooting: bracket expansion failed above max_speed");
  }
  for (int it = 0; it < 200 && b - a > width; ++it) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    (over(m) ? a : b) = m;
  }
  return 0.5 * (a + b);
}

void require_zero(const Kinetics& f, double u, const char* what) {
  if (std::abs(f(u)) > 1e-12) throw ModelError(std::string(what) + ": f must vanish at the connected levels");
}

std::size_t bracket(const std::vector<double>& xs, double s) {
  auto it = std::upper_bound(xs.begin(), xs.end(), s);
  return std::min(static_cast<std::size_t>(it - xs.begin()), xs.size() - 1) - 1;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double s) {
  if (xs.empty()) throw ModelError("empty profile");
  if (s <= xs.front()) return ys.front();
  if (s >= xs.back()) return ys.back();
  std::size_t i = bracket(xs, s);
  double w = (s - xs[i]) / (xs[i + 1] - xs[i]);
  return (1.0 - w) * ys[i] + w * ys[i + 1];
}

// Cubic Hermite interpolation of samples ys with derivatives dys.
double hermite(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::vector<double>& dys, double s) {
  if (xs.empty()) throw ModelError("empty profile");
  if (s <= xs.front()) return ys.front();
  if (s >= xs.back()) return ys.back();
  std::size_t i = bracket(xs, s);
  double h = xs[i + 1] - xs[i];
  double t = (s - xs[i]) / h;
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ys[i] + (t3 - 2 * t2 + t) * h * dys[i] + (-2 * t3 + 3 * t2) * ys[i + 1] +
         (t3 - t2) * h * dys[i + 1];
}

// Second derivative of y at sample i from the first derivatives dy, the most
// consistent of the centred and the two one-sided fourth-order stencils
// (a one-sided stencil avoids a kink in f next to the sample).
double second_derivative(const std::vector<double>& dy, std::size_t i, double dx,
                         const std::function<double(double)>& expected) {
  const std::size_t n = dy.size();
  double best = kInf;
  auto consider = [&](double value) { best = std::min(best, std::abs(value - expected(value))); };
  if (i >= 2 && i + 2 < n)
    consider((-dy[i + 2] + 8.0 * dy[i + 1] - 8.0 * dy[i - 1] + dy[i - 2]) / (12.0 * dx));
  if (i + 4 < n)
    consider((-25.0 * dy[i] + 48.0 * dy[i + 1] - 36.0 * dy[i + 2] + 16.0 * dy[i + 3] - 3.0 * dy[i + 4]) /
             (12.0 * dx));
  if (i >= 4)
    consider((25.0 * dy[i] - 48.0 * dy[i - 1] + 36.0 * dy[i - 2] - 16.0 * dy[i - 3] + 3.0 * dy[i - 4]) /
             (12.0 * dx));
  return best;
}

}  // namespace

// ---------------------------------------------------------------- Kinetics

double Kinetics::derivative(double u, double lo, double hi) const {
  if (df) return df(u);
  const double h = 1e-5 * std::max(1e-3, hi - lo);
  if (u - lo < h) return (-3.0 * f(u) + 4.0 * f(u + h) - f(u + 2.0 * h)) / (2.0 * h);
  if (hi - u < h) return (3.0 * f(u) - 4.0 * f(u - h) + f(u - 2.0 * h)) / (2.0 * h);
  return (f(u + h) - f(u - h)) / (2.0 * h);
}

double Kinetics::primitive(double u) const {
  if (F) return F(u);
  u = std::clamp(u, 0.0, 1.0);
  if (u == 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, u, 15, 1e-14);
}

Kinetics Kinetics::of(const ReactionTerm& reaction) {
  if (reaction.time_dependent()) throw ModelError("traveling waves need an autonomous reaction");
  ReactionTerm r = reaction;
  Kinetics k;
  k.f = [r](double u) { return r({0.0, 0.0}, 0.0, u); };
  k.df = [r](double u) { return r.deriv_u({0.0, 0.0}, 0.0, u); };
  k.F = [r](double u) { return r.primitive(u); };
  return k;
}

Kinetics Kinetics::of(std::function<double(double)> f) {
  Kinetics k;
  k.f = [f = std::move(f)](double u) { return u > 0.0 && u < 1.0 ? f(u) : 0.0; };
  return k;
}

Kinetics Kinetics::scaled(double s) const {
  Kinetics k;
  k.f = [f = f, s](double u) { return s * f(u); };
  if (df) k.df = [df = df, s](double u) { return s * df(u); };
  if (F) k.F = [F = F, s](double u) { return s * F(u); };
  return k;
}

Kinetics Kinetics::reflected() const {
  Kinetics k;
  k.f = [f = f](double u) { return -f(1.0 - u); };
  if (df) k.df = [df = df](double u) { return df(1.0 - u); };
  Kinetics self = *this;
  double F1 = self.primitive(1.0);
  k.F = [self, F1](double u) { return self.primitive(1.0 - std::clamp(u, 0.0, 1.0)) - F1; };
  return k;
}

// ------------------------------------------------------------- WaveProfile

double WaveProfile::value_at(double s) const { return hermite(x, profile, slope, s); }
double WaveProfile::slope_at(double s) const { return interpolate(x, slope, s); }

double WaveProfile::position_of(double level) const {
  if (profile.size() < 2 || !(level < profile.front() && level > profile.back()))
    throw ModelError("position_of: level outside the profile range");
  std::size_t lo = 0, hi = profile.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    (profile[mid] >= level ? lo : hi) = mid;
  }
  double w = (profile[lo] - level) / (profile[lo] - profile[hi]);
  return x[lo] + w * (x[hi] - x[lo]);
}

std::function<double(Vec2)> WaveProfile::datum(Vec2 e, double shift) const {
  return [wave = *this, e, shift](Vec2 p) { return wave.value_at(p[0] * e[0] + p[1] * e[1] - shift); };
}

std::vector<std::string> WaveProfile::check() const {
  std::vector<std::string> failures;
  if (profile.size() < 5) return {"profile has fewer than 5 samples"};
  for (std::size_t i = 1; i + 1 < slope.size(); ++i) {
    if (!(slope[i] < 0.0)) {
      failures.push_back("profile not strictly decreasing at x = " + std::to_string(x[i]));
      break;
    }
  }
  if (std::abs(profile.front() - theta_hi) > 1e-6) failures.push_back("left end gap exceeds 1e-6");
  if (std::abs(profile.back() - theta_lo) > 1e-6) failures.push_back("right end gap exceeds 1e-6");
  if (!(residual <= 1e-6)) failures.push_back("residual " + std::to_string(residual) + " exceeds 1e-6");
  return failures;
}

// ---------------------------------------------------------------- shooting

ShotOutcome shoot(const Kinetics& f, double theta_lo, double theta_hi, double c,
                  const ShootingOptions& options) {
  Trajectory t = trajectory(f, theta_lo, theta_hi, c, options, options.tolerance, 0.0);
  return {t.overshoot, t.lowest};
}

double separating_speed(const Kinetics& f, double theta_lo, double theta_hi,
                        const ShootingOptions& options, double lower, double upper) {
  return bisect_speed(f, theta_lo, theta_hi, options, lower, upper, options.speed_tolerance,
                      options.tolerance);
}

WaveProfile assemble_wave(const Kinetics& f, double theta_lo, double theta_hi, double c,
                          const ShootingOptions& options) {
  // Tighten the speed well below the reported tolerance so the sampled
  // trajectory follows the connection down to the end gap.
  const double tol = options.tolerance * 1e-2;
  const double width = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(c));
  const double pad = std::max(2.0 * options.speed_tolerance, 1e-9);
  double refined = bisect_speed(f, theta_lo, theta_hi, options, c - pad, c + pad, width, tol);

  const double gap = 5e-7 * std::max(1.0, theta_hi - theta_lo);
  Trajectory best;
  double best_c = refined;
  for (double trial : {refined, refined + width, refined - width}) {
    Trajectory t = trajectory(f, theta_lo, theta_hi, trial, options, tol, gap);
    if (t.reached_gap || best.phi.empty() ||
        (!best.reached_gap && t.phi.back() < best.phi.back() && !t.overshoot)) {
      best = std::move(t);
      best_c = trial;
    }
    if (best.reached_gap) break;
  }

  WaveProfile w;
  w.theta_hi = theta_hi;
  w.theta_lo = theta_lo;
  w.c = best_c;
  w.x = std::move(best.x);
  w.profile = std::move(best.phi);
  w.slope = std::move(best.slope);
  const double mid = 0.5 * (theta_lo + theta_hi);
  if (w.profile.size() >= 2 && w.profile.front() > mid && w.profile.back() < mid) {
    double shift = w.position_of(mid);
    for (double& xi : w.x) xi -= shift;
  }
  const double dx = options.sample_spacing;
  for (std::size_t i = 1; i + 1 < w.x.size(); ++i) {
    // phi'' should equal -c phi' - f(phi).
    double target = -w.c * w.slope[i] - f(w.profile[i]);
    double dev = second_derivative(w.slope, i, dx, [target](double) { return target; });
    w.residual = std::max(w.residual, dev);
  }
  return w;
}

WaveProfile bistable_wave(const Kinetics& f, double theta_lo, double theta_hi,
                          const ShootingOptions& options) {
  if (!(theta_lo < theta_hi)) throw ModelError("bistable_wave: theta_lo must be below theta_hi");
  require_zero(f, theta_lo, "bistable_wave");
  require_zero(f, theta_hi, "bistable_wave");
  if (sign_pattern(f, theta_lo, theta_hi) != std::vector<int>{-1, 1})
    throw ModelError("bistable_wave: f must be negative and then positive between the levels");
  double c = separating_speed(f, theta_lo, theta_hi, options);
  WaveProfile w = assemble_wave(f, theta_lo, theta_hi, c, options);
  w.c = c;
  return w;
}

WaveProfile combustion_wave(const Kinetics& f, double theta_ignition,
                            const ShootingOptions& options) {
  if (!(theta_ignition > 0.0 && theta_ignition < 1.0))
    throw ModelError("combustion_wave: ignition level must lie in (0, 1)");
  for (int i = 0; i <= 1000; ++i)
    if (f(theta_ignition * i / 1000.0) != 0.0)
      throw ModelError("combustion_wave: f must vanish on [0, theta]");
  require_zero(f, 1.0, "combustion_wave");
  if (sign_pattern(f, theta_ignition, 1.0) != std::vector<int>{1})
    throw ModelError("combustion_wave: f must be positive on (theta, 1)");
  double c = separating_speed(f, 0.0, 1.0, options, 0.0, 1.0);
  if (!(c > 0.0)) throw NumericalError("combustion_wave: shooting returned a nonpositive speed");
  WaveProfile w = assemble_wave(f, 0.0, 1.0, c, options);
  w.c = c;
  return w;
}

double monostable_min_speed(const Kinetics& f, double theta_lo, double theta_hi,
                            const ShootingOptions& options) {
  if (!(theta_lo < theta_hi)) throw ModelError("monostable_min_speed: theta_lo must be below theta_hi");
  require_zero(f, theta_lo, "monostable_min_speed");
  require_zero(f, theta_hi, "monostable_min_speed");
  if (sign_pattern(f, theta_lo, theta_hi) != std::vector<int>{1})
    throw ModelError("monostable_min_speed: f must be positive between the levels");
  double lin = 2.0 * std::sqrt(std::max(0.0, f.derivative(theta_lo, theta_lo, theta_hi)));
  return separating_speed(f, theta_lo, theta_hi, options, lin, std::max(1.0, 2.0 * lin));
}

// ------------------------------------------------------------- phase plane

PhasePlaneReport phase_plane_bump(const Kinetics& f, double phi0, double slope0,
                                  const WaveProfile* wave, const ShootingOptions& options) {
  if (!(slope0 < 0.0)) throw ModelError("phase_plane_bump: slope0 must be negative");
  PhasePlaneReport r;
  r.phi0 = phi0;
  r.slope0 = slope0;
  const double tol = options.tolerance * 1e-2;
  const double dx = options.sample_spacing;
  const double length = 1e3;
  auto rhs = [&](const State& s, State& ds) {
    ds[0] = s[1];
    ds[1] = -f(s[0]);
  };
  const double H0 = 0.5 * slope0 * slope0 + f.primitive(phi0);
  auto drift = [&](double, const State& s) {
    r.hamiltonian_drift =
        std::max(r.hamiltonian_drift, std::abs(0.5 * s[1] * s[1] + f.primitive(s[0]) - H0));
  };

  // Right half-line.
  double lowest = phi0;
  SampleFn right_sample = [&](double x, const State& s) {
    drift(x, s);
    lowest = std::min(lowest, s[0]);
  };
  std::vector<EventFn> right_events = {[](const State& s) { return -s[1]; },
                                       [](const State& s) { return s[0]; }};
  Hit right = integrate(rhs, {phi0, slope0}, 0.0, length, right_events, tol, dx, right_sample);
  drift(right.x, right.s);
  if (right.event == 1) {
    r.x2 = right.x;
    r.inf_right = -kInf;
  } else if (right.event == 0) {
    r.right_stationary = right.x;
    r.inf_right = right.s[0];
  } else {
    r.right_inconclusive = true;
    r.inf_right = std::min(lowest, right.s[0]);
  }

  // Left half-line through y(s) = q(-s), which solves the same equation.
  double highest = phi0;
  SampleFn left_sample = [&](double x, const State& s) {
    drift(x, s);
    highest = std::max(highest, s[0]);
  };
  std::vector<EventFn> left_events = {[](const State& s) { return s[1]; }};
  Hit left = integrate(rhs, {phi0, -slope0}, 0.0, length, left_events, tol, dx, left_sample);
  drift(left.x, left.s);
  if (left.event == 0) {
    r.x1 = -left.x;
    r.sup_left = left.s[0];
  } else {
    r.left_inconclusive = true;
    r.sup_left = std::max(highest, left.s[0]);
  }

  if (wave) {
    double s = wave->position_of(phi0);
    double phi_slope = wave->slope_at(s);
    // Slopes equal up to interpolation error count as both cases.
    double slack = 1e-9 * std::abs(phi_slope);
    if (slope0 <= phi_slope + slack) r.right_conclusion = r.inf_right < wave->theta_lo;
    if (phi_slope <= slope0 + slack) r.left_conclusion = !r.left_inconclusive && r.sup_left < wave->theta_hi;
  }

  if (r.x1 && r.x2) {
    // q(x1 + .) is even: sample the descent from the maximum.
    SampleFn from_peak = [&](double x, const State& st) {
      r.x.push_back(*r.x1 + x);
      r.q.push_back(st[0]);
      r.dq.push_back(st[1]);
    };
    std::vector<EventFn> zero = {[](const State& st) { return st[0]; }};
    integrate(rhs, {r.sup_left, 0.0}, 0.0, length, zero, tol, dx, from_peak);
  }
  return r;
}

// ---------------------------------------------------------- zero structure

bool StabilityReport::has_degenerate() const {
  return std::any_of(zeros.begin(), zeros.end(), [](const ZeroInfo& z) { return z.degenerate; });
}

std::optional<double> StabilityReport::S_of(double level, double tol) const {
  for (const auto& l : levels)
    if (std::abs(l.level - level) <= tol) return l.S;
  return std::nullopt;
}

StabilityReport stability_intervals(const Kinetics& f, int samples) {
  std::vector<double> u(samples + 1), v(samples + 1);
  double fmax = 0.0;
  for (int i = 0; i <= samples; ++i) {
    u[i] = static_cast<double>(i) / samples;
    v[i] = f(u[i]);
    fmax = std::max(fmax, std::abs(v[i]));
  }
  auto is_zero = [&](int i) { return std::abs(v[i]) <= 1e-14 * fmax; };

  StabilityReport report;
  int i = 0;
  while (i <= samples) {
    if (is_zero(i)) {
      int j = i;
      while (j + 1 <= samples && is_zero(j + 1)) ++j;
      ZeroInfo z;
      z.lo = u[i];
      z.hi = u[j];
      z.left_sign = i > 0 ? sign_of(v[i - 1]) : 0;
      z.right_sign = j < samples ? sign_of(v[j + 1]) : 0;
      z.degenerate = z.left_sign != 0 && z.left_sign == z.right_sign;
      report.zeros.push_back(z);
      i = j + 1;
      continue;
    }
    if (i + 1 <= samples && !is_zero(i + 1)) {
      if (v[i] * v[i + 1] < 0.0) {
        double a = u[i], b = u[i + 1];
        double fa = v[i];
        while (b - a > 1e-10) {
          double m = 0.5 * (a + b);
          double fm = f(m);
          if (fm == 0.0) {
            a = b = m;
            break;
          }
          if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        ZeroInfo z;
        z.lo = z.hi = 0.5 * (a + b);
        z.left_sign = sign_of(v[i]);
        z.right_sign = sign_of(v[i + 1]);
        report.zeros.push_back(z);
      } else if (i > 0 && !is_zero(i - 1) && v[i - 1] * v[i] > 0.0 && v[i] * v[i + 1] > 0.0 &&
                 std::abs(v[i]) < std::abs(v[i - 1]) && std::abs(v[i]) < std::abs(v[i + 1]) &&
                 std::abs(v[i]) < 1e-7 * fmax) {
        // Near-tangential approach to zero between samples.
        ZeroInfo z;
        z.lo = z.hi = u[i];
        z.left_sign = z.right_sign = sign_of(v[i]);
        z.degenerate = true;
        report.zeros.push_back(z);
      }
    }
    ++i;
  }

  for (std::size_t k = 0; k < report.zeros.size(); ++k) {
    const ZeroInfo& z = report.zeros[k];
    if (!z.stable_from_below()) continue;
    report.levels.push_back({z.lo, k > 0 ? report.zeros[k - 1].hi : 0.0});
  }
  return report;
}

// -------------------------------------------------------------- bump datum

double BumpProfile::value_at(double x) const {
  double r0 = std::abs(x);
  if (r.empty() || r0 >= half_width()) return 0.0;
  return std::max(0.0, hermite(r, values, slopes, r0));
}

std::function<double(Vec2)> BumpProfile::datum(double plateau) const {
  return [bump = *this, plateau](Vec2 p) {
    double radius = std::hypot(p[0], p[1]);
    return bump.value_at(std::max(0.0, radius - plateau));
  };
}

BumpProfile build_bump_subsolution(const Kinetics& f, int m, const TerraceDecomposition& terrace,
                                   const ShootingOptions& options) {
  if (m < 1 || m > terrace.tiers()) throw ModelError("build_bump_subsolution: level index out of range");
  const double target = terrace.levels[m];
  StabilityReport zeros = stability_intervals(f);
  std::optional<double> S = zeros.S_of(target, 1e-6);
  if (!S || !(*S > terrace.levels[m - 1]))
    throw ModelError("build_bump_subsolution: no S in (theta_{m-1}, theta_m) with f > 0 on (S, theta_m)");

  const auto& raw = terrace.pre_merge_levels;
  std::size_t j = 0;
  while (j < raw.size() && std::abs(raw[j] - target) > 1e-9) ++j;
  if (j == 0 || j >= raw.size()) throw ModelError("build_bump_subsolution: level missing from the raw terrace");
  const WaveProfile& wave = terrace.pre_merge_waves[j - 1];

  BumpProfile b;
  b.target_level = target;
  b.launch_level = 0.5 * (*S + target);
  double s0 = wave.position_of(b.launch_level);
  PhasePlaneReport pp = phase_plane_bump(f, b.launch_level, wave.slope_at(s0), &wave, options);
  if (!pp.x1) throw NumericalError("build_bump_subsolution: no stationary point on the left");
  if (!pp.x2) throw NumericalError("build_bump_subsolution: zero not found within the integration window");
  if (!(pp.sup_left < target)) throw NumericalError("build_bump_subsolution: maximum is not below the level");
  b.x1 = *pp.x1;
  b.x2 = *pp.x2;
  b.peak = pp.sup_left;
  for (std::size_t i = 1; i < j; ++i) b.descent_levels.push_back(raw[i]);
  if (b.descent_levels.size() > raw.size())
    throw NumericalError("build_bump_subsolution: descent did not terminate");
  b.r.reserve(pp.x.size());
  for (std::size_t i = 0; i < pp.x.size(); ++i) {
    b.r.push_back(pp.x[i] - b.x1);
    b.values.push_back(pp.q[i]);
    b.slopes.push_back(pp.dq[i]);
  }
  return b;
}

std::function<double(Vec2)> discrete_bump(const Kinetics& f, const BumpProfile& bump, double spacing,
                                          double diffusion) {
  if (!(spacing > 0.0) || !(diffusion > 0.0)) throw ModelError("discrete_bump: spacing and diffusion must be positive");
  const double k = spacing * spacing / diffusion;
  std::vector<double> b = {bump.peak};
  double next = bump.peak - 0.5 * k * f(bump.peak);
  const std::size_t limit = 100 + static_cast<std::size_t>(10.0 * (bump.half_width() + 1.0) / spacing);
  while (next > 0.0) {
    if (next > b.back() || b.size() > limit)
      throw NumericalError("discrete_bump: the grid trajectory does not descend to 0");
    b.push_back(next);
    std::size_t i = b.size() - 1;
    next = 2.0 * b[i] - b[i - 1] - k * f(b[i]);
  }
  return [b = std::move(b), spacing](Vec2 x) {
    auto i = static_cast<std::size_t>(std::lround(std::abs(x[0]) / spacing));
    return i < b.size() ? b[i] : 0.0;
  };
}

BumpValidation validate_bump(const Model& model, const BumpProfile& bump, double T, double spacing,
                             double tolerance) {
  const double reach = 2.0 * std::sqrt(model.reaction.lipschitz()) * T;
  GridSpec g = GridSpec::box(1, bump.half_width() + reach + 20.0, spacing);
  Field u0 = Field::from_function(
      g, discrete_bump(Kinetics::of(model.reaction), bump, g.spacing(), model.coefficients.diffusion));
  MonotonicityObserver mono;
  RunResult run_result = run(model, u0, T, {&mono});
  BumpValidation v;
  v.T = T;
  v.min_increment = mono.min_increment();
  v.origin_value = *run_result.u.sample({0.0, 0.0});
  v.passed = v.min_increment >= -tolerance && v.origin_value >= bump.target_level - 0.01;
  return v;
}

void write_wave_csv(const std::string& path, const WaveProfile& wave) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(12);
  out << "x,phi,dphi\n";
  for (std::size_t i = 0; i < wave.x.size(); ++i)
    out << wave.x[i] << ',' << wave.profile[i] << ',' << wave.slope[i] << '\n';
}

}  // namespace wulffspread
