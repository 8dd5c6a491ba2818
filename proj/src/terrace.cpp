#include "wulffspread/terrace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wulffspread {

namespace {

std::vector<int> interior_signs(const Kinetics& f, double lo, double hi) {
  std::vector<int> pattern;
  for (int i = 1; i < 4000; ++i) {
    double v = f(lo + (hi - lo) * i / 4000.0);
    int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s != 0 && (pattern.empty() || pattern.back() != s)) pattern.push_back(s);
  }
  return pattern;
}

double tier_speed(const Kinetics& f, double lo, double hi, const ShootingOptions& o) {
  if (interior_signs(f, lo, hi) == std::vector<int>{1}) return monostable_min_speed(f, lo, hi, o);
  return separating_speed(f, lo, hi, o);
}

}  // namespace

std::vector<std::string> TerraceDecomposition::check() const {
  std::vector<std::string> failures;
  if (levels.size() != speeds.size() + 1 || waves.size() != speeds.size())
    return {"levels, speeds and waves have inconsistent sizes"};
  if (levels.front() != 0.0 || levels.back() != 1.0) failures.push_back("levels must run from 0 to 1");
  for (std::size_t m = 1; m < levels.size(); ++m)
    if (!(levels[m] > levels[m - 1])) failures.push_back("levels not strictly increasing");
  for (std::size_t m = 0; m < speeds.size(); ++m) {
    if (!(speeds[m] > 0.0)) failures.push_back("nonpositive speed");
    if (m > 0 && !(speeds[m - 1] - speeds[m] > 1e-6)) failures.push_back("speeds not strictly decreasing");
    const WaveProfile& w = waves[m];
    if (std::abs(w.theta_hi - levels[m + 1]) > 1e-9 || std::abs(w.theta_lo - levels[m]) > 1e-9)
      failures.push_back("wave " + std::to_string(m + 1) + " does not connect adjacent levels");
    for (const auto& f : w.check()) failures.push_back("wave " + std::to_string(m + 1) + ": " + f);
  }
  for (std::size_t m = 1; m < pre_merge_speeds.size(); ++m)
    if (pre_merge_speeds[m] > pre_merge_speeds[m - 1] + 1e-6)
      failures.push_back("raw speeds not nonincreasing");
  return failures;
}

SpeedSelection remove_equal_speeds(const std::vector<double>& levels,
                                   const std::vector<double>& speeds, double tol) {
  if (levels.size() != speeds.size() + 1) throw ModelError("remove_equal_speeds: size mismatch");
  SpeedSelection out;
  out.levels.push_back(levels.front());
  for (std::size_t m = 0; m < speeds.size(); ++m) {
    bool repeated = false;
    for (std::size_t n = m + 1; n < speeds.size() && !repeated; ++n)
      repeated = std::abs(speeds[m] - speeds[n]) <= tol;
    if (repeated) continue;
    out.levels.push_back(levels[m + 1]);
    out.speeds.push_back(speeds[m]);
    out.kept.push_back(static_cast<int>(m));
  }
  return out;
}

TerraceDecomposition compute_terrace(const Kinetics& f, const ShootingOptions& options) {
  StabilityReport zeros = stability_intervals(f);
  if (zeros.has_degenerate()) throw ModelError("compute_terrace: f has a degenerate zero");
  if (std::abs(f(1.0 - 1e-12)) > 1e-9 || !zeros.S_of(1.0))
    throw ModelError("compute_terrace: 1 must be a zero of f that is stable from below");
  std::vector<double> stall_levels;
  for (const auto& z : zeros.zeros)
    if (z.stable() && z.lo > 0.0 && z.hi < 1.0) stall_levels.push_back(z.lo);

  // Top-down: shoot from hi towards 0; a trajectory that stalls at an
  // intermediate stable zero splits off the tier hi -> that zero.
  std::vector<double> top_down_levels = {1.0};
  std::vector<double> top_down_speeds;
  double hi = 1.0;
  while (hi > 0.0) {
    double c = tier_speed(f, 0.0, hi, options);
    ShotOutcome shot = shoot(f, 0.0, hi, c + 2.0 * options.speed_tolerance, options);
    double lo = 0.0;
    for (double s : stall_levels)
      if (s < hi && std::abs(shot.lowest - s) < std::abs(shot.lowest - lo)) lo = s;
    if (lo > 0.0) c = tier_speed(f, lo, hi, options);
    top_down_levels.push_back(lo);
    top_down_speeds.push_back(c);
    hi = lo;
  }
  std::vector<double> levels(top_down_levels.rbegin(), top_down_levels.rend());
  std::vector<double> speeds(top_down_speeds.rbegin(), top_down_speeds.rend());

  TerraceDecomposition t;
  // A lower tier slower than the one above it is replaced by a direct
  // connection across the shared level.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t m = 0; m + 1 < speeds.size(); ++m) {
      if (speeds[m] + 1e-6 < speeds[m + 1]) {
        double c = separating_speed(f, levels[m], levels[m + 2], options, speeds[m], speeds[m + 1]);
        t.notes.push_back("merged tiers across level " + std::to_string(levels[m + 1]));
        levels.erase(levels.begin() + static_cast<long>(m) + 1);
        speeds.erase(speeds.begin() + static_cast<long>(m) + 1);
        speeds[m] = c;
        merged = true;
        break;
      }
    }
  }
  for (double c : speeds)
    if (!(c > 0.0))
      throw ModelError("compute_terrace: a tier has nonpositive speed; the model needs c_M > 0");

  t.pre_merge_levels = levels;
  t.pre_merge_speeds = speeds;
  for (std::size_t m = 0; m < speeds.size(); ++m)
    t.pre_merge_waves.push_back(assemble_wave(f, levels[m], levels[m + 1], speeds[m], options));
  for (std::size_t m = 0; m < speeds.size(); ++m) t.pre_merge_waves[m].c = speeds[m];

  SpeedSelection sel = remove_equal_speeds(levels, speeds);
  t.levels = sel.levels;
  t.speeds = sel.speeds;
  for (int k : sel.kept) t.waves.push_back(t.pre_merge_waves[static_cast<std::size_t>(k)]);
  if (sel.kept.size() != speeds.size())
    t.notes.push_back("equal-speed tiers removed; kept waves connect only part of their tier");
  for (std::size_t m = 0; m + 1 < speeds.size(); ++m) {
    double gap = std::abs(speeds[m] - speeds[m + 1]);
    if (gap > 1e-6 && gap <= 1e-5)
      t.notes.push_back("borderline: tiers " + std::to_string(m + 1) + " and " + std::to_string(m + 2) +
                        " differ in speed by " + std::to_string(gap));
  }
  return t;
}

// ------------------------------------------------------------ verification

bool MultitierReport::passed() const {
  return !probes.empty() &&
         std::all_of(probes.begin(), probes.end(), [](const TierProbe& p) { return p.passed; });
}

MultitierReport verify_multitier(const Model& model, const TerraceDecomposition& terrace,
                                 const GridSpec& grid, double T, const MultitierOptions& options) {
  if (terrace.tiers() < 1) throw ModelError("verify_multitier: empty terrace");
  const int M = terrace.tiers();
  const double c1 = terrace.speeds.front();
  const double reach = 1.1 * c1 * T;
  if (reach + grid.spacing() >= grid.domain_half_width)
    throw ModelError("verify_multitier: the box does not contain |x| = 1.1 c_1 T");

  Kinetics f = Kinetics::of(model.reaction);
  BumpProfile bump = build_bump_subsolution(f, M, terrace);
  Field u0 = grid.dim == 1
                 ? Field::from_function(grid, discrete_bump(f, bump, grid.spacing(), model.coefficients.diffusion))
                 : Field::from_function(grid, bump.datum(options.plateau));
  SimulationOptions sim;
  sim.contamination_error = options.contamination_error;
  RunResult r = run(model, u0, T, {}, sim);

  std::vector<Vec2> dirs;
  if (grid.dim == 1) {
    dirs = {{1.0, 0.0}, {-1.0, 0.0}};
  } else {
    for (int k = 0; k < options.directions; ++k) {
      double a = 2.0 * std::numbers::pi * k / options.directions;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
  }
  auto values_at = [&](double c) {
    std::vector<double> v;
    for (Vec2 e : dirs) {
      auto s = r.u.sample({e[0] * c * T, e[1] * c * T});
      if (!s) throw ModelError("verify_multitier: probe outside the box");
      v.push_back(*s);
    }
    return v;
  };

  MultitierReport report;
  report.T = T;
  report.grid = grid;
  report.stats = r.stats;
  const double tol = options.tolerance;
  for (int m = 1; m < M; ++m) {
    TierProbe p{"plateau", m, 0.5 * (terrace.speeds[m - 1] + terrace.speeds[m]), terrace.levels[m]};
    double worst_dev = 0.0;
    for (double v : values_at(p.speed)) {
      if (std::abs(v - p.expected) >= worst_dev) {
        worst_dev = std::abs(v - p.expected);
        p.worst = v;
      }
    }
    p.margin = tol - worst_dev;
    p.passed = p.margin >= 0.0;
    report.probes.push_back(p);
  }
  {
    TierProbe p{"ahead", 0, 1.1 * c1, tol};
    auto v = values_at(p.speed);
    p.worst = *std::max_element(v.begin(), v.end());
    p.margin = tol - p.worst;
    p.passed = p.margin >= 0.0;
    report.probes.push_back(p);
  }
  {
    TierProbe p{"behind", M, 0.9 * terrace.speeds.back(), terrace.levels.back() - tol};
    auto v = values_at(p.speed);
    p.worst = *std::min_element(v.begin(), v.end());
    p.margin = p.worst - p.expected;
    p.passed = p.margin >= 0.0;
    report.probes.push_back(p);
  }
  return report;
}

// ---------------------------------------------------------------- empirics

EmpiricalTerrace terrace_from_run(const std::vector<double>& times, const std::vector<Field>& fields,
                                  const Kinetics& f, double fit_fraction) {
  if (fields.empty() || fields.size() != times.size())
    throw ModelError("terrace_from_run: need one field per time");
  const Field& u = fields.back();
  if (u.grid.dim != 1) throw ModelError("terrace_from_run: 1D runs only");
  const int n = u.nx();
  const double h = u.grid.spacing();

  std::vector<double> grad(n, 0.0);
  double gmax = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    grad[i] = std::abs(u.at(i + 1) - u.at(i - 1)) / (2.0 * h);
    gmax = std::max(gmax, grad[i]);
  }
  grad[0] = grad[1];
  grad[n - 1] = grad[n - 2];

  std::vector<double> zero_levels;
  for (const auto& z : stability_intervals(f).zeros) {
    zero_levels.push_back(z.lo);
    if (z.hi != z.lo) zero_levels.push_back(z.hi);
  }
  auto near_zero = [&](double v) {
    return std::any_of(zero_levels.begin(), zero_levels.end(),
                       [&](double z) { return std::abs(v - z) <= 0.02; });
  };

  const int min_nodes = std::max(10, static_cast<int>(std::ceil(1.0 / h)));
  std::vector<double> plateaus;
  for (int i = 0; i < n;) {
    if (grad[i] > 1e-3 * gmax) {
      ++i;
      continue;
    }
    int j = i;
    double sum = 0.0;
    while (j < n && grad[j] <= 1e-3 * gmax) sum += u.at(j++);
    double mean = sum / (j - i);
    if (j - i >= min_nodes && near_zero(mean)) {
      bool known = std::any_of(plateaus.begin(), plateaus.end(),
                               [&](double p) { return std::abs(p - mean) <= 0.02; });
      if (!known) plateaus.push_back(mean);
    }
    i = j;
  }
  if (plateaus.size() < 2) throw NumericalError("terrace_from_run: fewer than two plateaus resolved");
  std::sort(plateaus.begin(), plateaus.end());

  EmpiricalTerrace out;
  out.levels = plateaus;
  for (std::size_t k = 0; k + 1 < plateaus.size(); ++k) {
    InterfaceTrack track;
    track.e = {1.0, 0.0};
    track.eta = 0.5 * (plateaus[k] + plateaus[k + 1]);
    for (std::size_t s = 0; s < fields.size(); ++s) {
      track.times.push_back(times[s]);
      track.positions.push_back(level_position(fields[s], track.e, track.eta));
    }
    track.fit(fit_fraction);
    out.speeds.push_back(track.fit_speed);
    out.interfaces.push_back(std::move(track));
  }
  return out;
}

EmpiricalTerrace terrace_run(const Model& model, double T, const TerraceRunOptions& options) {
  double guess = options.speed_guess > 0.0 ? options.speed_guess
                                           : 2.0 * std::sqrt(model.reaction.lipschitz());
  GridSpec g = GridSpec::box(1, guess * T + 20.0, options.spacing);
  Field u0 = Field::from_function(g, front_like_datum({1.0, 0.0}));
  SimulationOptions sim;
  sim.boundary.left = 1.0;
  double dt = step_for(model, g, T, sim);
  sim.dt = dt;
  int outputs = static_cast<int>(std::lround(T / (std::max(1L, std::lround(0.1 / dt)) * dt)));
  SnapshotObserver snaps(std::max(1, outputs / std::max(1, options.snapshots)));
  run(model, u0, T, {&snaps}, sim);
  return terrace_from_run(snaps.times(), snaps.fields(), Kinetics::of(model.reaction));
}

}  // namespace wulffspread
