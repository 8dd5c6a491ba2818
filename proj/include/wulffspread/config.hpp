#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wulffspread/model.hpp"

namespace wulffspread {

/// Malformed or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// INI schema. Unknown sections or keys are rejected.
//
//   [model]   name, theta, amplitude, modulation, scale
//   [grid]    dim, half_width, spacing, cells
//   [run]     T, direction (degrees from e1), method (eigen|front|wave), angles,
//             initial (bump|front|file), initial_file, bump_radius,
//             observers (comma list of interface, radius, monotonicity),
//             output_root
//   [verify]  eps, eta_hi, eta_lo, shrink, tolerance, directions, plateau,
//             contamination_error (true|false)
//
// Zero means "pick the default for the subcommand" for dim, spacing, cells,
// T and angles; resolve() replaces every such value. half_width = 0 stays in
// the resolved config for speed, verify and terrace, which size the box from
// the expected travel distance.
struct RunConfig {
  std::string model = "homogeneous_kpp";
  std::optional<double> theta, amplitude, modulation, scale;

  int dim = 0;
  double half_width = 0.0;
  double spacing = 0.0;
  int cells = 0;

  double T = 0.0;
  double direction = 0.0;
  std::string method = "eigen";
  int angles = 0;
  std::string initial = "bump";
  std::string initial_file;
  double bump_radius = 2.0;
  std::vector<std::string> observers = {"interface"};
  std::string output_root = "runs";

  double eps = 0.2;
  double eta_hi = 0.9;
  double eta_lo = 0.05;
  double shrink = 1.0;
  double tolerance = 0.05;
  int directions = 8;
  double plateau = 0.0;
  bool contamination_error = true;

  bool operator==(const RunConfig&) const = default;

  ModelOverrides overrides() const { return {theta, amplitude, modulation, scale}; }
  Vec2 unit_direction() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Every key, doubles printed with round-trip precision.
std::string serialize_config(const RunConfig& config);

/// Fills subcommand defaults and validates ranges; throws ConfigError.
RunConfig resolve(RunConfig config, const std::string& subcommand);

}  // namespace wulffspread
