#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wulffspread {

using Vec2 = std::array<double, 2>;

/// Raised for malformed models, grids and coefficient fields.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The period is 1 along every axis. The cell grid samples [0,1)^dim at
// nodes i / cells_per_period; the simulation box is [-L, L]^dim.
struct GridSpec {
  int dim = 1;
  int cells_per_period = 64;
  double domain_half_width = 60.0;
  int points_per_axis = 2401;
  bool periodic_box = false;

  double cell_spacing() const { return 1.0 / cells_per_period; }
  double spacing() const {
    return periodic_box ? 2.0 * domain_half_width / points_per_axis
                        : 2.0 * domain_half_width / (points_per_axis - 1);
  }
  double coordinate(int i) const { return -domain_half_width + i * spacing(); }
  std::size_t node_count() const;

  void validate() const;

  /// Box [-L, L]^dim with (approximately) the requested spacing; the node
  /// count is rounded so that the origin is a grid node.
  static GridSpec box(int dim, double half_width, double spacing, bool periodic = false);
  static GridSpec cell(int dim, int cells_per_period);
};

// Analytic description of A(x) and q(x). Fields are sampled from it on
// whatever grid a consumer needs, so models stay serializable.
//   A(x) = (diffusion + diffusion_amplitude * sin 2 pi x1) I
//   q(x) = shear_amplitude * (sin 2 pi x2, sin 2 pi x1)
struct CoefficientSpec {
  double diffusion = 1.0;
  double diffusion_amplitude = 0.0;
  double shear_amplitude = 0.0;

  /// (a11, a12, a22) at x.
  std::array<double, 3> diffusion_at(Vec2 x) const;
  Vec2 advection_at(Vec2 x, int dim) const;
  bool homogeneous() const { return diffusion_amplitude == 0.0 && shear_amplitude == 0.0; }
  bool depends_only_on_x1() const { return shear_amplitude == 0.0; }
};

enum class ReactionKind { kpp, monostable, combustion, bistable, multistable, ap_time };

std::string_view to_string(ReactionKind kind);
std::optional<ReactionKind> reaction_kind_from_string(std::string_view name);

/// Nonlinearity f(x, t, u) = scale * r(x) * f0(t, u) on [0, 1], extended by 0
/// outside, with r(x) = 1 + modulation * sin(2 pi x1).
///
///   kpp          f0 = u (1 - u)
///   monostable   f0 = u^2 (1 - u)
///   combustion   f0 = (u - theta)_+ (1 - u)
///   bistable     f0 = u (1 - u) (u - theta)
///   multistable  f0 = u (1 - u) prod_i (u - zeros[i])
///   ap_time      f0 = u (1 - u) (u - theta(t)),
///                theta(t) = theta + amplitude (sin t + sin sqrt(2) t)
struct ReactionTerm {
  ReactionKind kind = ReactionKind::kpp;
  double theta = 0.0;
  double amplitude = 0.0;
  std::vector<double> zeros;
  double scale = 1.0;
  double modulation = 0.0;

  static ReactionTerm kpp(double scale = 1.0);
  static ReactionTerm monostable(double scale = 1.0);
  static ReactionTerm combustion(double theta, double scale = 1.0);
  static ReactionTerm bistable(double theta, double scale = 1.0);
  static ReactionTerm multistable(std::vector<double> zeros, double scale = 1.0);
  static ReactionTerm ap_time(double mean_theta, double amplitude);

  double operator()(Vec2 x, double t, double u) const {
    return spatial_factor(x) * profile(t, u);
  }
  double deriv_u(Vec2 x, double t, double u) const {
    return spatial_factor(x) * profile_deriv(t, u);
  }
  /// f0(t, u) alone; operator() multiplies by scale * r(x).
  double profile(double t, double u) const;
  double profile_deriv(double t, double u) const;
  double spatial_factor(Vec2 x) const;
  double linearization_at_zero(Vec2 x) const { return deriv_u(x, 0.0, 0.0); }

  double theta_at(double t) const;
  /// Upper bound of |df/du| over x, t and u in [0, 1].
  double lipschitz() const;
  /// F(u) = int_0^u scale * f0 for autonomous reactions.
  double primitive(double u) const;

  bool time_dependent() const { return kind == ReactionKind::ap_time && amplitude != 0.0; }
  bool spatially_homogeneous() const { return modulation == 0.0; }
  bool satisfies_kpp() const { return kind == ReactionKind::kpp; }

  void validate() const;
};

/// Expected outputs recorded with each catalog entry.
struct Expectation {
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  std::string provenance;  // "closed form", "oracle: ...", "invariant"
};

struct Model {
  std::string name;
  CoefficientSpec coefficients;
  ReactionTerm reaction;
  std::vector<Expectation> expectations;

  bool spatially_homogeneous() const {
    return coefficients.homogeneous() && reaction.spatially_homogeneous();
  }
  const Expectation* expectation(std::string_view quantity) const;
};

struct ModelOverrides {
  std::optional<double> theta;
  std::optional<double> amplitude;
  std::optional<double> modulation;
  std::optional<double> scale;
};

std::vector<std::string> catalog_names();
/// Throws ModelError for unknown names.
Model builtin_model(std::string_view name, const ModelOverrides& overrides = {});

// A(x), q(x), d_u f(x, 0) sampled on the cell grid, node index i + n * j.
struct PeriodicCoefficients {
  int dim = 1;
  int n = 0;
  std::vector<double> a11, a12, a22;
  std::vector<double> q1, q2;
  std::vector<double> lin;

  std::size_t size() const { return lin.size(); }
  std::size_t index(int i, int j) const;
  Vec2 node(std::size_t k) const;

  static PeriodicCoefficients sample(const CoefficientSpec& spec, const ReactionTerm& reaction,
                                     int dim, int n);
  static PeriodicCoefficients sample(const Model& model, const GridSpec& cell_grid) {
    return sample(model.coefficients, model.reaction, cell_grid.dim, cell_grid.cells_per_period);
  }
};

struct CoefficientReport {
  double a_min = 0.0;
  double a_max = 0.0;
  double max_divergence = 0.0;
  double mean_advection = 0.0;  // Euclidean norm of the cell average of q
  double max_advection = 0.0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

CoefficientReport validate_coefficients(const PeriodicCoefficients& c);

}  // namespace wulffspread
