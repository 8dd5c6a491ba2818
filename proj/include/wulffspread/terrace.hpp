#pragma once

#include <string>
#include <vector>

#include "wulffspread/model.hpp"
#include "wulffspread/pdesim.hpp"
#include "wulffspread/waves.hpp"

namespace wulffspread {

/// Levels 0 = theta_0 < ... < theta_M = 1 and speeds c_1 > ... > c_M > 0;
/// speeds[m - 1] and waves[m - 1] belong to the tier theta_m -> theta_{m-1}.
struct TerraceDecomposition {
  std::vector<double> levels;
  std::vector<double> speeds;
  std::vector<WaveProfile> waves;
  // The raw sequence after the ordering merges, before equal speeds are removed.
  std::vector<double> pre_merge_levels;
  std::vector<double> pre_merge_speeds;
  std::vector<WaveProfile> pre_merge_waves;
  std::vector<std::string> notes;

  int tiers() const { return static_cast<int>(speeds.size()); }
  /// Empty when all invariants hold.
  std::vector<std::string> check() const;
};

struct SpeedSelection {
  std::vector<double> levels;  // starts with the bottom level
  std::vector<double> speeds;
  std::vector<int> kept;       // raw tier index (0-based) of every kept tier
};

/// Drops (theta_m, c_m) whenever c_m = c_n (within tol) for some n > m.
SpeedSelection remove_equal_speeds(const std::vector<double>& levels,
                                   const std::vector<double>& speeds, double tol = 1e-6);

TerraceDecomposition compute_terrace(const Kinetics& f, const ShootingOptions& options = {});

struct TierProbe {
  std::string kind;       // "plateau", "ahead", "behind"
  int m = 0;              // level index checked
  double speed = 0.0;     // probe speed c; the probe sits at |x| = c T
  double expected = 0.0;  // theta_m, or the bound for "ahead" / "behind"
  double worst = 0.0;     // worst sampled value over the probe directions
  double margin = 0.0;    // tolerance minus the worst deviation
  bool passed = false;
};

struct MultitierReport {
  double T = 0.0;
  GridSpec grid;
  std::vector<TierProbe> probes;
  SimulationStats stats;
  bool passed() const;
};

struct MultitierOptions {
  int directions = 8;       // 2D radial probes
  double tolerance = 0.05;
  double plateau = 0.0;     // flat top added to the bump datum in 2D
  bool contamination_error = true;
};

/// Runs from the bump below the top level and probes u(T, x) at |x| = c T
/// between consecutive tier speeds, ahead of c_1 and behind c_M.
MultitierReport verify_multitier(const Model& model, const TerraceDecomposition& terrace,
                                 const GridSpec& grid, double T, const MultitierOptions& options = {});

struct EmpiricalTerrace {
  std::vector<double> levels;  // plateau values, ascending
  std::vector<double> speeds;  // speeds[k]: interface between levels[k] and levels[k + 1]
  std::vector<InterfaceTrack> interfaces;
};

/// Plateaus of the last field (|u_x| <= 1e-3 max |u_x|, within 0.02 of a zero
/// of f) and the speeds of the mid-level crossings between them over the last
/// `fit_fraction` of the run. Throws NumericalError when no plateau is resolved.
EmpiricalTerrace terrace_from_run(const std::vector<double>& times, const std::vector<Field>& fields,
                                  const Kinetics& f, double fit_fraction = 0.5);

struct TerraceRunOptions {
  double spacing = 0.05;
  double speed_guess = 0.0;  // 0: 2 sqrt(Lip f); sizes the box
  int snapshots = 200;
};

/// 1D run from the smoothed step datum, analysed by terrace_from_run.
EmpiricalTerrace terrace_run(const Model& model, double T, const TerraceRunOptions& options = {});

}  // namespace wulffspread
