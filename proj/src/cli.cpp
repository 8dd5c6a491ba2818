#include "wulffspread/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <list>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "wulffspread/eigensolver.hpp"
#include "wulffspread/io.hpp"
#include "wulffspread/parallel.hpp"
#include "wulffspread/pdesim.hpp"
#include "wulffspread/terrace.hpp"
#include "wulffspread/waves.hpp"
#include "wulffspread/wulff.hpp"

namespace wulffspread {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now(const char* format) {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, format);
  return s.str();
}

// Collects checks and output files for one run.
struct Record {
  fs::path dir;
  json results = json::object();
  json checks = json::array();
  json outputs = json::array();

  std::string file(const std::string& name) {
    outputs.push_back(name);
    return (dir / name).string();
  }
  bool check(const std::string& name, bool passed, double value, double bound, const std::string& relation) {
    checks.push_back({{"name", name}, {"passed", passed}, {"value", value}, {"bound", bound}, {"relation", relation}});
    return passed;
  }
  bool all_passed() const {
    for (const auto& c : checks)
      if (!c["passed"].get<bool>()) return false;
    return true;
  }
};

json stats_json(const SimulationStats& s) {
  return {{"steps", s.steps},
          {"dt", s.dt},
          {"max_contamination", s.max_contamination},
          {"min_value", s.min_value},
          {"max_value", s.max_value},
          {"warnings", s.warnings}};
}

json track_json(const InterfaceTrack& t) {
  return {{"e", {t.e[0], t.e[1]}}, {"eta", t.eta}, {"fit_speed", t.fit_speed}, {"fit_residual", t.fit_residual},
          {"fit_points", t.fit_points}};
}

double diffusion_max(const Model& m) {
  return m.coefficients.diffusion + std::abs(m.coefficients.diffusion_amplitude);
}

// Speed expectation of a catalog entry along e, if it has one.
const Expectation* speed_expectation(const Model& m, Vec2 e, const RunConfig& c) {
  for (const char* q : {"c_star", "wave_speed", "front_speed"})
    if (const Expectation* x = m.expectation(q)) return x;
  if (c.dim == 1 && c.cells == 64 && e[0] == 1.0)
    if (const Expectation* x = m.expectation("c_star_e1")) return x;
  return nullptr;
}

// Isotropic single-tier wave speed for an autonomous homogeneous model.
double homogeneous_wave_speed(const Model& m) {
  if (!m.spatially_homogeneous() || m.reaction.time_dependent())
    throw ConfigError("the wave route needs an autonomous, spatially homogeneous model");
  TerraceDecomposition t = compute_terrace(Kinetics::of(m.reaction));
  if (t.tiers() != 1)
    throw ConfigError("the model has a " + std::to_string(t.tiers()) +
                      "-tier terrace; use the terrace subcommand");
  return std::sqrt(m.coefficients.diffusion) * t.speeds[0];
}

DirectionalSpeedTable speed_table(const Model& m, const RunConfig& c, Record& rec) {
  int count = c.dim == 1 ? 2 : c.angles;
  if (m.reaction.satisfies_kpp()) {
    GridSpec cell = GridSpec::cell(c.dim, c.cells);
    PeriodicCoefficients coeffs = PeriodicCoefficients::sample(m, cell);
    std::vector<double> speeds(count);
    auto probe = DirectionalSpeedTable::tabulate(c.dim, count, [](Vec2) { return 1.0; }, SpeedSource::eigenvalue);
    parallel_for(count, [&](std::size_t i) { speeds[i] = critical_speed(coeffs, probe.direction(i), cell).c_star; });
    probe.speeds = speeds;
    probe.validate();
    rec.results["speed_source"] = "eigenvalue";
    return probe;
  }
  double c0 = homogeneous_wave_speed(m);
  rec.results["speed_source"] = "wave_bvp";
  return DirectionalSpeedTable::tabulate(c.dim, count, [c0](Vec2) { return c0; }, SpeedSource::wave_bvp);
}

void write_speed_table(const std::string& path, const DirectionalSpeedTable& t) {
  std::ofstream out(path);
  out << "angle,c_star\n" << std::setprecision(17);
  for (std::size_t i = 0; i < t.size(); ++i) out << t.angles[i] << "," << t.speeds[i] << "\n";
}

json shape_json(const WulffShape& s) {
  return {{"min_radius", s.min_radius()},
          {"max_radius", s.max_radius()},
          {"radius_e1", s.radius_at(0.0)},
          {"radius_e2", s.dim == 2 ? s.radius_at(std::numbers::pi / 2) : s.radius_at(std::numbers::pi)},
          {"interpolation", s.interpolation}};
}

// ------------------------------------------------------------ subcommands

void run_speed(const RunConfig& c, const Model& m, Record& rec, std::ostream& out) {
  Vec2 e = c.unit_direction();
  rec.results["direction"] = {e[0], e[1]};
  double speed = 0.0;
  const Expectation* expected = speed_expectation(m, e, c);
  double tolerance = expected ? expected->tolerance : 0.0;

  if (c.method == "eigen") {
    if (!m.reaction.satisfies_kpp())
      throw ConfigError("eigenvalue route invalid outside KPP: the reaction is " +
                        std::string(to_string(m.reaction.kind)) + "; use --method front or --method wave");
    GridSpec cell = GridSpec::cell(c.dim, c.cells);
    CriticalSpeed cs = critical_speed(PeriodicCoefficients::sample(m, cell), e, cell);
    speed = cs.c_star;
    rec.results["c_star"] = cs.c_star;
    rec.results["lambda_star"] = cs.lambda_star;
    std::ofstream trace(rec.file("eigen_trace.csv"));
    trace << "lambda,g\n" << std::setprecision(17);
    for (const auto& p : cs.trace) trace << p.lambda << "," << p.g << "\n";
  } else if (c.method == "front") {
    if (!reducible_along(m, e)) throw ConfigError("front route needs a model that is 1D-reducible along the direction");
    FrontRunOptions fo;
    fo.spacing = c.spacing;
    fo.half_width = c.half_width;
    fo.speed_guess = std::max(2.5, 2.0 * std::sqrt(m.reaction.lipschitz() * diffusion_max(m)));
    FrontSpeed fs = front_like_speed(m, e, c.T, fo);
    speed = fs.speed;
    rec.results["front_speed"] = fs.speed;
    rec.results["track"] = track_json(fs.track);
    rec.results["stats"] = stats_json(fs.stats);
    write_track_csv(rec.file("interface.csv"), fs.track);
    tolerance = 0.03;  // cross-route agreement
  } else {
    speed = homogeneous_wave_speed(m);
    rec.results["wave_speed"] = speed;
  }
  rec.results["speed"] = speed;
  out << "c*(e) = " << std::fixed << std::setprecision(6) << speed << std::defaultfloat << "\n";
  if (expected) {
    double rel = std::abs(speed - expected->value) / std::abs(expected->value);
    double err = c.method == "front" ? rel : std::abs(speed - expected->value);
    rec.check("speed vs " + expected->quantity + " (" + expected->provenance + ")", err <= tolerance, err, tolerance,
              c.method == "front" ? "relative <=" : "absolute <=");
  }
}

void run_wulff(const RunConfig& c, const Model& m, Record& rec, std::ostream& out) {
  DirectionalSpeedTable table = speed_table(m, c, rec);
  WulffShape shape = build_wulff(table);
  write_speed_table(rec.file("speeds.csv"), table);
  write_polygon_csv(shape, rec.file("wulff.csv"));
  write_polygon_svg(shape, rec.file("wulff.svg"));
  rec.results["shape"] = shape_json(shape);
  NormalPropertyReport normal = check_normal_property(shape, table);
  rec.check("normal property", normal.passed(1e-3), normal.max_violation, 1e-3, "relative <=");
  if (c.dim == 2) {
    ContinuityReport cont = check_continuity(shape, table);
    rec.check("Lipschitz continuity", cont.passed, cont.max_slope, cont.constant, "<=");
  }
  out << "w: min " << shape.min_radius() << ", max " << shape.max_radius() << "\n";
}

void run_simulate(const RunConfig& c, const Model& m, Record& rec, std::ostream& out) {
  Vec2 e = c.unit_direction();
  SimulationOptions so;
  so.contamination_error = c.contamination_error;
  Field u0;
  if (c.initial == "file") {
    u0 = read_field(c.initial_file).field;
    // Dirichlet data continue the dumped edges.
    int n = u0.nx(), mid = u0.ny() / 2;
    so.boundary.left = u0.at(0, mid);
    so.boundary.right = u0.at(n - 1, mid);
    if (u0.grid.dim == 2) {
      so.boundary.bottom = u0.at(n / 2, 0);
      so.boundary.top = u0.at(n / 2, u0.ny() - 1);
    }
  } else {
    GridSpec g = GridSpec::box(c.dim, c.half_width, c.spacing);
    if (c.initial == "bump") {
      u0 = Field::from_function(g, bump_datum(c.bump_radius));
    } else {
      u0 = Field::from_function(g, front_like_datum(e));
      // Trailing side held at 1.
      if (e[0] == 1.0) so.boundary.left = 1.0;
      else if (e[0] == -1.0) so.boundary.right = 1.0;
      else if (e[1] == 1.0) so.boundary.bottom = 1.0;
      else if (e[1] == -1.0) so.boundary.top = 1.0;
      else throw ConfigError("front data need an axis direction");
    }
  }
  if (c.dim == 1) so.ray_direction = e;

  std::vector<Observer*> observers;
  std::optional<InterfaceObserver> interface;
  std::optional<RadiusObserver> radius;
  std::optional<MonotonicityObserver> monotone;
  for (const auto& o : c.observers) {
    if (o == "interface" && !interface) observers.push_back(&interface.emplace(c.dim == 1 ? Vec2{1.0, 0.0} : e));
    if (o == "radius" && !radius) {
      std::vector<Vec2> dirs;
      int n = u0.grid.dim == 1 ? 2 : 8;
      for (int k = 0; k < n; ++k) {
        double a = 2.0 * std::numbers::pi * k / n;
        dirs.push_back({std::round(std::cos(a) * 1e12) / 1e12, std::round(std::sin(a) * 1e12) / 1e12});
      }
      observers.push_back(&radius.emplace(dirs));
    }
    if (o == "monotonicity" && !monotone) observers.push_back(&monotone.emplace());
  }

  RunResult r = run(m, u0, c.T, observers, so);
  write_field(rec.file("u_final.bin"), r.u, r.t, {{"model", m.name}});
  rec.outputs.push_back("u_final.bin.meta");
  rec.results["t"] = r.t;
  rec.results["stats"] = stats_json(r.stats);
  rec.results["u_min"] = r.u.min();
  rec.results["u_max"] = r.u.max();
  if (interface) {
    InterfaceTrack t = interface->track();
    rec.results["interface"] = track_json(t);
    write_track_csv(rec.file("interface.csv"), t);
    out << "interface speed " << t.fit_speed << "\n";
  }
  if (radius) write_radius_csv(rec.file("radius.csv"), radius->curves());
  if (monotone) rec.results["min_increment"] = monotone->min_increment();
  rec.check("solution stays in [0, 1]", r.stats.min_value >= 0.0 && r.stats.max_value <= 1.0,
            std::max(-r.stats.min_value, r.stats.max_value - 1.0), 0.0, "<=");
  out << "u(T) in [" << r.u.min() << ", " << r.u.max() << "]\n";
}

void run_verify(const RunConfig& c, const Model& m, Record& rec, std::ostream& out) {
  DirectionalSpeedTable table = speed_table(m, c, rec);
  WulffShape shape = build_wulff(table);
  // The solution spreads with the unscaled shape whatever shrink is.
  double reach = std::max(1.0, c.shrink) * shape.max_radius();
  if (c.shrink != 1.0) shape = shape.scaled(c.shrink);
  write_speed_table(rec.file("speeds.csv"), table);
  write_polygon_csv(shape, rec.file("wulff.csv"));
  write_polygon_svg(shape, rec.file("wulff.svg"));
  rec.results["shape"] = shape_json(shape);

  double L = c.half_width > 0.0 ? c.half_width : (1.0 + c.eps) * reach * c.T + 10.0;
  rec.results["half_width"] = L;
  GridSpec g = GridSpec::box(c.dim, L, c.spacing);
  SimulationOptions so;
  so.contamination_error = c.contamination_error;
  std::vector<Vec2> dirs;
  for (int k = 0; k < (c.dim == 1 ? 2 : 8); ++k) {
    double a = 2.0 * std::numbers::pi * k / (c.dim == 1 ? 2 : 8);
    dirs.push_back({std::round(std::cos(a) * 1e12) / 1e12, std::round(std::sin(a) * 1e12) / 1e12});
  }
  RadiusObserver radius(dirs);
  RunResult r = run(m, Field::from_function(g, bump_datum(c.bump_radius)), c.T, {&radius}, so);
  write_field(rec.file("u_final.bin"), r.u, r.t, {{"model", m.name}});
  rec.outputs.push_back("u_final.bin.meta");
  write_radius_csv(rec.file("radius.csv"), radius.curves());
  rec.results["stats"] = stats_json(r.stats);

  SpreadingReport s = verify_spreading_set(r.u, c.T, shape, c.eps, c.eta_hi, c.eta_lo);
  rec.results["inside_points"] = s.inside_points;
  rec.results["outside_points"] = s.outside_points;
  rec.check("min u(T, xT) over (1 - eps) W", s.inside_pass, s.inside_min, c.eta_hi, ">=");
  rec.check("max u(T, xT) outside (1 + eps) W", s.outside_pass, s.outside_max, c.eta_lo, "<=");
  out << "inside min " << s.inside_min << (s.inside_pass ? " pass" : " FAIL") << ", outside max " << s.outside_max
      << (s.outside_pass ? " pass" : " FAIL") << "\n";
}

void run_terrace(const RunConfig& c, const Model& m, Record& rec, std::ostream& out) {
  if (!m.spatially_homogeneous() || m.reaction.time_dependent())
    throw ConfigError("terrace needs an autonomous, spatially homogeneous model");
  TerraceDecomposition t = compute_terrace(Kinetics::of(m.reaction));
  json tiers = json::array();
  for (int k = 0; k < t.tiers(); ++k) {
    tiers.push_back({{"upper", t.levels[k + 1]}, {"lower", t.levels[k]}, {"speed", t.speeds[k]}});
    write_wave_csv(rec.file("wave_" + std::to_string(k + 1) + ".csv"), t.waves[k]);
    out << "tier " << k + 1 << ": " << t.levels[k + 1] << " -> " << t.levels[k] << ", c = " << t.speeds[k] << "\n";
  }
  rec.results["tiers"] = tiers;
  rec.results["notes"] = t.notes;
  std::vector<std::string> problems = t.check();
  rec.results["invariant_failures"] = problems;
  rec.check("terrace invariants", problems.empty(), static_cast<double>(problems.size()), 0.0, "<=");

  double c1 = t.speeds[0];
  double L = c.half_width > 0.0 ? c.half_width : 1.1 * c1 * c.T + 10.0 + (c.dim == 2 ? c.plateau : 0.0);
  GridSpec g = GridSpec::box(c.dim, L, c.spacing);
  MultitierOptions mo;
  mo.directions = c.directions;
  mo.tolerance = c.tolerance;
  mo.plateau = c.plateau;
  mo.contamination_error = c.contamination_error;
  MultitierReport report = verify_multitier(m, t, g, c.T, mo);
  json probes = json::array();
  for (const auto& p : report.probes) {
    probes.push_back({{"kind", p.kind}, {"m", p.m}, {"speed", p.speed}, {"expected", p.expected}, {"worst", p.worst},
                      {"margin", p.margin}, {"passed", p.passed}});
    rec.check("probe " + p.kind + " at c = " + std::to_string(p.speed), p.passed, p.margin, 0.0, "margin >=");
  }
  rec.results["probes"] = probes;
  rec.results["multitier_stats"] = stats_json(report.stats);

  TerraceRunOptions ro;
  ro.spacing = c.dim == 1 ? c.spacing : 0.05;
  ro.speed_guess = 1.2 * c1;
  EmpiricalTerrace e = terrace_run(m, c.T, ro);
  rec.results["empirical"] = {{"levels", e.levels}, {"speeds", e.speeds}};
  bool same_count = !e.levels.empty() && e.levels.size() == t.levels.size();
  rec.check("empirical tier count", same_count, static_cast<double>(e.speeds.size()), t.tiers(), "==");
  if (same_count) {
    for (std::size_t k = 1; k + 1 < t.levels.size(); ++k) {
      double d = std::abs(e.levels[k] - t.levels[k]);
      rec.check("plateau level " + std::to_string(k), d <= 0.02, d, 0.02, "absolute <=");
    }
    for (int k = 0; k < t.tiers(); ++k) {
      double d = std::abs(e.speeds[k] / t.speeds[k] - 1.0);
      rec.check("empirical speed " + std::to_string(k + 1), d <= 0.05, d, 0.05, "relative <=");
    }
  }
  out << "multitier probes " << (report.passed() ? "pass" : "FAIL") << "\n";
}

}  // namespace

std::string make_run_dir(const std::string& root, const std::string& subcommand) {
  std::string base = (fs::path(root) / (utc_now("%Y%m%d-%H%M%S") + "-" + subcommand)).string();
  std::string dir = base;
  for (int k = 2; fs::exists(dir); ++k) dir = base + "-" + std::to_string(k);
  return dir;
}

RunOutcome execute(const std::string& subcommand, const RunConfig& config, const std::string& run_dir,
                   std::ostream& out) {
  RunOutcome outcome;
  outcome.run_dir = run_dir;
  Record rec;
  rec.dir = run_dir;
  std::string started = utc_now("%Y-%m-%dT%H:%M:%SZ");
  std::string status = "pass";
  std::string error;
  RunConfig resolved = config;

  try {
    fs::create_directories(run_dir);
  } catch (const fs::filesystem_error& e) {
    error = e.what();
    outcome.exit_code = exit_config_error;
    outcome.summary = {{"status", "config_error"}, {"error", error}};
    std::cerr << "error: " << error << "\n";
    return outcome;
  }

  try {
    resolved = resolve(config, subcommand);
    {
      std::ofstream f(rec.file("config.resolved"));
      f << serialize_config(resolved);
    }
    Model m = builtin_model(resolved.model, resolved.overrides());
    rec.results["model"] = m.name;
    if (subcommand == "speed") run_speed(resolved, m, rec, out);
    else if (subcommand == "wulff") run_wulff(resolved, m, rec, out);
    else if (subcommand == "simulate") run_simulate(resolved, m, rec, out);
    else if (subcommand == "verify") run_verify(resolved, m, rec, out);
    else run_terrace(resolved, m, rec, out);
    if (!rec.all_passed()) {
      status = "fail";
      outcome.exit_code = exit_check_failed;
    }
  } catch (const ConfigError& e) {
    status = "config_error";
    error = e.what();
    outcome.exit_code = exit_config_error;
  } catch (const ModelError& e) {
    status = "config_error";
    error = e.what();
    outcome.exit_code = exit_config_error;
  } catch (const std::exception& e) {
    status = "error";
    error = e.what();
    outcome.exit_code = exit_check_failed;
  }

  json summary = {{"artifact", "wulffspread"},
                  {"version", WULFFSPREAD_VERSION},
                  {"subcommand", subcommand},
                  {"status", status},
                  {"exit_code", outcome.exit_code},
                  {"started", started},
                  {"finished", utc_now("%Y-%m-%dT%H:%M:%SZ")},
                  {"config", serialize_config(resolved)},
                  {"results", rec.results},
                  {"checks", rec.checks},
                  {"outputs", rec.outputs}};
  if (!error.empty()) summary["error"] = error;
  std::ofstream(fs::path(run_dir) / "summary.json") << summary.dump(2) << "\n";
  if (!error.empty()) std::cerr << "error: " << error << "\n";
  out << status << " (" << run_dir << ")\n";
  outcome.summary = std::move(summary);
  return outcome;
}

namespace {

// Command-line values that override the config file when given.
struct Flags {
  std::string config_path, run_dir;
  RunConfig values;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;
  bool no_contamination_check = false;
  CLI::Option* no_contamination = nullptr;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* o = app->add_option(name, values.*field, help);
    setters.push_back({o, [this, field](RunConfig& c) { c.*field = values.*field; }});
    return o;
  }
  void add_optional(CLI::App* app, const std::string& name, std::optional<double> RunConfig::*field,
                    const std::string& help) {
    auto* store = &scratch.emplace_back();
    CLI::Option* o = app->add_option(name, *store, help);
    setters.push_back({o, [store, field](RunConfig& c) { c.*field = *store; }});
  }
  std::list<double> scratch;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "INI file with [model], [grid], [run], [verify] sections");
  app->add_option("--run-dir", f.run_dir, "exact output directory instead of <output-root>/<timestamp>-<subcommand>");
  f.add(app, "--model", &RunConfig::model, "catalog model");
  f.add_optional(app, "--theta", &RunConfig::theta, "threshold override");
  f.add_optional(app, "--amplitude", &RunConfig::amplitude, "time-oscillation amplitude override");
  f.add_optional(app, "--modulation", &RunConfig::modulation, "spatial modulation override");
  f.add_optional(app, "--scale", &RunConfig::scale, "reaction scale override");
  f.add(app, "--dim", &RunConfig::dim, "1 or 2");
  f.add(app, "--half-width", &RunConfig::half_width, "box half width");
  f.add(app, "--spacing", &RunConfig::spacing, "grid spacing");
  f.add(app, "--cells", &RunConfig::cells, "cell-problem grid points per period");
  f.add(app, "--output-root", &RunConfig::output_root, "parent directory of run directories");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spreading sets, front speeds and terraces for reaction-diffusion equations"};
  app.require_subcommand(1);
  std::map<std::string, std::unique_ptr<Flags>> flags;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    auto& f = flags[name] = std::make_unique<Flags>();
    add_common(s, *f);
    return std::pair<CLI::App*, Flags*>{s, f.get()};
  };

  {
    auto [s, f] = sub("speed", "critical speed c*(e)");
    f->add(s, "--direction", &RunConfig::direction, "direction angle in degrees from e1");
    f->add(s, "--method", &RunConfig::method, "eigen | front | wave");
    f->add(s, "--T", &RunConfig::T, "front-route horizon");
  }
  {
    auto [s, f] = sub("wulff", "Wulff shape from the directional speeds");
    f->add(s, "--angles", &RunConfig::angles, "number of directions");
  }
  {
    auto [s, f] = sub("simulate", "run the PDE and record observers");
    f->add(s, "--initial", &RunConfig::initial, "bump | front | file");
    f->add(s, "--file", &RunConfig::initial_file, "field dump used with --initial file");
    f->add(s, "--T", &RunConfig::T, "final time");
    f->add(s, "--direction", &RunConfig::direction, "front and interface direction in degrees");
    f->add(s, "--bump-radius", &RunConfig::bump_radius, "radius of the bump datum");
    f->add(s, "--observers", &RunConfig::observers, "interface, radius, monotonicity")->delimiter(',');
    s->add_flag("--no-contamination-check", f->no_contamination_check, "record boundary contamination without failing");
  }
  {
    auto [s, f] = sub("verify", "eigen speeds, Wulff shape, 2D bump run and spreading-set check");
    f->add(s, "--T", &RunConfig::T, "final time");
    f->add(s, "--eps", &RunConfig::eps, "relative margin around W");
    f->add(s, "--eta-hi", &RunConfig::eta_hi, "inside threshold");
    f->add(s, "--eta-lo", &RunConfig::eta_lo, "outside threshold");
    f->add(s, "--shrink", &RunConfig::shrink, "multiply W by this factor before checking");
    f->add(s, "--angles", &RunConfig::angles, "number of directions");
    f->add(s, "--bump-radius", &RunConfig::bump_radius, "radius of the bump datum");
    s->add_flag("--no-contamination-check", f->no_contamination_check, "record boundary contamination without failing");
  }
  {
    auto [s, f] = sub("terrace", "terrace decomposition, multitier probes and empirical cross-check");
    f->add(s, "--T", &RunConfig::T, "final time");
    f->add(s, "--tolerance", &RunConfig::tolerance, "probe tolerance");
    f->add(s, "--directions", &RunConfig::directions, "2D probe directions");
    f->add(s, "--plateau", &RunConfig::plateau, "flat top added to the 2D bump");
    s->add_flag("--no-contamination-check", f->no_contamination_check, "record boundary contamination without failing");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_config_error;
  }

  CLI::App* chosen = app.get_subcommands().front();
  std::string name = chosen->get_name();
  Flags& f = *flags[name];
  RunConfig config;
  std::string root = "runs";
  try {
    if (!f.config_path.empty()) config = load_config(f.config_path);
    for (auto& [option, apply] : f.setters)
      if (option->count() > 0) apply(config);
    if (f.no_contamination_check) config.contamination_error = false;
    root = config.output_root;
  } catch (const ConfigError& e) {
    std::string dir = f.run_dir.empty() ? make_run_dir(root, name) : f.run_dir;
    fs::create_directories(dir);
    json summary = {{"artifact", "wulffspread"}, {"version", WULFFSPREAD_VERSION}, {"subcommand", name},
                    {"status", "config_error"},  {"exit_code", exit_config_error}, {"error", e.what()}};
    std::ofstream(fs::path(dir) / "summary.json") << summary.dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return exit_config_error;
  }
  std::string dir = f.run_dir.empty() ? make_run_dir(root, name) : f.run_dir;
  return execute(name, config, dir, out).exit_code;
}

}  // namespace wulffspread
