#include "wulffspread/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace wulffspread {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"name", "theta", "amplitude", "modulation", "scale"}},
      {"grid", {"dim", "half_width", "spacing", "cells"}},
      {"run",
       {"T", "direction", "method", "angles", "initial", "initial_file", "bump_radius", "observers",
        "output_root"}},
      {"verify",
       {"eps", "eta_hi", "eta_lo", "shrink", "tolerance", "directions", "plateau",
        "contamination_error"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key + ": not an integer: '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

// Shortest %g form that reads back to the same double.
std::string fmt(double x) {
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void require_one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  throw ConfigError(key + ": '" + v + "' is not one of " + list);
}

}  // namespace

Vec2 RunConfig::unit_direction() const {
  double a = direction * std::numbers::pi / 180.0;
  Vec2 e = {std::cos(a), std::sin(a)};
  // Snap the axis directions so 1D reductions see exact unit vectors.
  for (double& c : e)
    if (std::abs(c) < 1e-15) c = 0.0;
  return e;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    auto known = schema().find(section);
    if (known == schema().end()) throw ConfigError("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("config: '" + section + "' must be a section");
    for (const auto& [key, node] : body) {
      if (!known->second.count(key))
        throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      std::string name = section + "." + key;
      std::string v = trim(node.data());
      if (section == "model") {
        if (key == "name") c.model = v;
        else if (key == "theta") c.theta = to_double(name, v);
        else if (key == "amplitude") c.amplitude = to_double(name, v);
        else if (key == "modulation") c.modulation = to_double(name, v);
        else if (key == "scale") c.scale = to_double(name, v);
      } else if (section == "grid") {
        if (key == "dim") c.dim = to_int(name, v);
        else if (key == "half_width") c.half_width = to_double(name, v);
        else if (key == "spacing") c.spacing = to_double(name, v);
        else if (key == "cells") c.cells = to_int(name, v);
      } else if (section == "run") {
        if (key == "T") c.T = to_double(name, v);
        else if (key == "direction") c.direction = to_double(name, v);
        else if (key == "method") c.method = v;
        else if (key == "angles") c.angles = to_int(name, v);
        else if (key == "initial") c.initial = v;
        else if (key == "initial_file") c.initial_file = v;
        else if (key == "bump_radius") c.bump_radius = to_double(name, v);
        else if (key == "observers") c.observers = split_list(v);
        else if (key == "output_root") c.output_root = v;
      } else {
        if (key == "eps") c.eps = to_double(name, v);
        else if (key == "eta_hi") c.eta_hi = to_double(name, v);
        else if (key == "eta_lo") c.eta_lo = to_double(name, v);
        else if (key == "shrink") c.shrink = to_double(name, v);
        else if (key == "tolerance") c.tolerance = to_double(name, v);
        else if (key == "directions") c.directions = to_int(name, v);
        else if (key == "plateau") c.plateau = to_double(name, v);
        else if (key == "contamination_error") c.contamination_error = to_bool(name, v);
      }
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[model]\nname = " << c.model << "\n";
  if (c.theta) out << "theta = " << fmt(*c.theta) << "\n";
  if (c.amplitude) out << "amplitude = " << fmt(*c.amplitude) << "\n";
  if (c.modulation) out << "modulation = " << fmt(*c.modulation) << "\n";
  if (c.scale) out << "scale = " << fmt(*c.scale) << "\n";
  out << "\n[grid]\ndim = " << c.dim << "\nhalf_width = " << fmt(c.half_width)
      << "\nspacing = " << fmt(c.spacing) << "\ncells = " << c.cells << "\n";
  std::string observers;
  for (const auto& o : c.observers) observers += (observers.empty() ? "" : ",") + o;
  out << "\n[run]\nT = " << fmt(c.T) << "\ndirection = " << fmt(c.direction) << "\nmethod = " << c.method
      << "\nangles = " << c.angles << "\ninitial = " << c.initial << "\n";
  if (!c.initial_file.empty()) out << "initial_file = " << c.initial_file << "\n";
  out << "bump_radius = " << fmt(c.bump_radius) << "\nobservers = " << observers
      << "\noutput_root = " << c.output_root << "\n";
  out << "\n[verify]\neps = " << fmt(c.eps) << "\neta_hi = " << fmt(c.eta_hi) << "\neta_lo = " << fmt(c.eta_lo)
      << "\nshrink = " << fmt(c.shrink) << "\ntolerance = " << fmt(c.tolerance)
      << "\ndirections = " << c.directions << "\nplateau = " << fmt(c.plateau)
      << "\ncontamination_error = " << (c.contamination_error ? "true" : "false") << "\n";
  return out.str();
}

RunConfig resolve(RunConfig c, const std::string& sub) {
  require_one_of("subcommand", sub, {"speed", "wulff", "simulate", "verify", "terrace"});
  auto names = catalog_names();
  if (std::find(names.begin(), names.end(), c.model) == names.end())
    throw ConfigError("model.name: unknown catalog model '" + c.model + "'");
  try {
    builtin_model(c.model, c.overrides()).reaction.validate();
  } catch (const ModelError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  require_one_of("run.method", c.method, {"eigen", "front", "wave"});
  require_one_of("run.initial", c.initial, {"bump", "front", "file"});
  for (const auto& o : c.observers) require_one_of("run.observers", o, {"interface", "radius", "monotonicity"});
  if (c.initial == "file" && c.initial_file.empty()) throw ConfigError("run.initial_file is required for initial = file");

  const bool axis = std::fmod(std::abs(c.direction), 180.0) == 0.0;
  if (c.dim == 0) c.dim = (sub == "wulff" || sub == "verify" || (sub == "speed" && !axis)) ? 2 : 1;
  if (c.dim != 1 && c.dim != 2) throw ConfigError("grid.dim must be 1 or 2");
  if (c.dim == 1 && !axis) throw ConfigError("run.direction must be 0 or 180 in 1D");
  if (c.cells == 0) c.cells = c.dim == 1 ? 64 : 48;
  if (c.angles == 0) c.angles = 64;
  if (c.spacing == 0.0) {
    if (sub == "verify") c.spacing = 0.12;
    else if (sub == "terrace") c.spacing = c.dim == 1 ? 0.05 : 0.25;
    else c.spacing = c.dim == 1 ? 0.05 : 0.12;
  }
  if (c.T == 0.0) {
    if (sub == "speed") c.T = 40.0;
    else if (sub == "simulate") c.T = 20.0;
    else if (sub == "verify") c.T = 30.0;
    else if (sub == "terrace") c.T = 200.0;
  }
  if (c.half_width == 0.0 && sub == "simulate") c.half_width = 60.0;

  if (c.cells < 8) throw ConfigError("grid.cells must be at least 8");
  if (!(c.spacing > 0.0)) throw ConfigError("grid.spacing must be positive");
  if (c.half_width < 0.0) throw ConfigError("grid.half_width must be nonnegative");
  if (c.half_width > 0.0 && c.half_width < 2.0 * c.spacing) throw ConfigError("grid.half_width is below two cells");
  if (!(c.T > 0.0) && sub != "wulff") throw ConfigError("run.T must be positive");
  if (c.angles < 64) throw ConfigError("run.angles must be at least 64");
  if (!(c.bump_radius > 0.0)) throw ConfigError("run.bump_radius must be positive");
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw ConfigError("verify.eps must lie in (0, 1)");
  if (!(c.eta_lo > 0.0 && c.eta_lo < c.eta_hi && c.eta_hi < 1.0))
    throw ConfigError("verify: need 0 < eta_lo < eta_hi < 1");
  if (!(c.shrink > 0.0)) throw ConfigError("verify.shrink must be positive");
  if (!(c.tolerance > 0.0)) throw ConfigError("verify.tolerance must be positive");
  if (c.directions < 1) throw ConfigError("verify.directions must be positive");
  if (c.plateau < 0.0) throw ConfigError("verify.plateau must be nonnegative");
  return c;
}

}  // namespace wulffspread
