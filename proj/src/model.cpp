#include "wulffspread/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wulffspread {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(2 pi x) evaluated on the reduced coordinate so that x and x + 1 give
// bit-identical results.
double periodic_sin(double x) { return std::sin(kTwoPi * (x - std::floor(x))); }

// Coefficients (lowest degree first) of the polynomial part of f0.
std::vector<double> multiply(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

std::vector<double> polynomial_of(const ReactionTerm& f) {
  std::vector<double> p = {0.0, 1.0, -1.0};  // u (1 - u)
  switch (f.kind) {
    case ReactionKind::kpp:
      break;
    case ReactionKind::monostable:
      p = multiply(p, {0.0, 1.0});
      break;
    case ReactionKind::bistable:
    case ReactionKind::ap_time:
      p = multiply(p, {-f.theta, 1.0});
      break;
    case ReactionKind::multistable:
      for (double z : f.zeros) p = multiply(p, {-z, 1.0});
      break;
    case ReactionKind::combustion:
      return {};
  }
  return p;
}

double horner(const std::vector<double>& p, double u) {
  double s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * u + *it;
  return s;
}

void require_level(double v, double lo, double hi, const char* what) {
  if (!(v > lo && v < hi)) {
    std::ostringstream os;
    os << what << " = " << v << " must lie in (" << lo << ", " << hi << ")";
    throw ModelError(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------- GridSpec

std::size_t GridSpec::node_count() const {
  std::size_t n = static_cast<std::size_t>(points_per_axis);
  return dim == 2 ? n * n : n;
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw ModelError("grid dimension must be 1 or 2");
  if (cells_per_period < 8 || cells_per_period % 2 != 0)
    throw ModelError("cells_per_period must be even and at least 8");
  if (!(domain_half_width > 0.0)) throw ModelError("domain_half_width must be positive");
  if (points_per_axis < 3) throw ModelError("points_per_axis must be at least 3");
  if (!(spacing() > 0.0)) throw ModelError("grid spacing must be positive");
}

GridSpec GridSpec::box(int dim, double half_width, double spacing, bool periodic) {
  GridSpec g;
  g.dim = dim;
  g.domain_half_width = half_width;
  g.periodic_box = periodic;
  // Even number of intervals keeps x = 0 on a node.
  int intervals = 2 * static_cast<int>(std::lround(half_width / spacing));
  g.points_per_axis = periodic ? intervals : intervals + 1;
  return g;
}

GridSpec GridSpec::cell(int dim, int cells_per_period) {
  GridSpec g;
  g.dim = dim;
  g.cells_per_period = cells_per_period;
  return g;
}

// --------------------------------------------------------- CoefficientSpec

std::array<double, 3> CoefficientSpec::diffusion_at(Vec2 x) const {
  double a = diffusion + diffusion_amplitude * periodic_sin(x[0]);
  return {a, 0.0, a};
}

Vec2 CoefficientSpec::advection_at(Vec2 x, int dim) const {
  if (dim == 1 || shear_amplitude == 0.0) return {0.0, 0.0};
  return {shear_amplitude * periodic_sin(x[1]), shear_amplitude * periodic_sin(x[0])};
}

// ------------------------------------------------------------ ReactionTerm

std::string_view to_string(ReactionKind kind) {
  switch (kind) {
    case ReactionKind::kpp: return "kpp";
    case ReactionKind::monostable: return "monostable";
    case ReactionKind::combustion: return "combustion";
    case ReactionKind::bistable: return "bistable";
    case ReactionKind::multistable: return "multistable";
    case ReactionKind::ap_time: return "ap_time";
  }
  return "unknown";
}

std::optional<ReactionKind> reaction_kind_from_string(std::string_view name) {
  for (auto k : {ReactionKind::kpp, ReactionKind::monostable, ReactionKind::combustion,
                 ReactionKind::bistable, ReactionKind::multistable, ReactionKind::ap_time})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

ReactionTerm ReactionTerm::kpp(double scale) {
  ReactionTerm f;
  f.kind = ReactionKind::kpp;
  f.scale = scale;
  return f;
}

ReactionTerm ReactionTerm::monostable(double scale) {
  ReactionTerm f;
  f.kind = ReactionKind::monostable;
  f.scale = scale;
  return f;
}

ReactionTerm ReactionTerm::combustion(double theta, double scale) {
  ReactionTerm f;
  f.kind = ReactionKind::combustion;
  f.theta = theta;
  f.scale = scale;
  f.validate();
  return f;
}

ReactionTerm ReactionTerm::bistable(double theta, double scale) {
  ReactionTerm f;
  f.kind = ReactionKind::bistable;
  f.theta = theta;
  f.scale = scale;
  f.validate();
  return f;
}

ReactionTerm ReactionTerm::multistable(std::vector<double> zeros, double scale) {
  ReactionTerm f;
  f.kind = ReactionKind::multistable;
  f.zeros = std::move(zeros);
  f.scale = scale;
  f.validate();
  return f;
}

ReactionTerm ReactionTerm::ap_time(double mean_theta, double amplitude) {
  ReactionTerm f;
  f.kind = ReactionKind::ap_time;
  f.theta = mean_theta;
  f.amplitude = amplitude;
  f.validate();
  return f;
}

double ReactionTerm::theta_at(double t) const {
  if (kind != ReactionKind::ap_time) return theta;
  return theta + amplitude * (std::sin(t) + std::sin(std::numbers::sqrt2 * t));
}

double ReactionTerm::spatial_factor(Vec2 x) const {
  return modulation == 0.0 ? scale : scale * (1.0 + modulation * periodic_sin(x[0]));
}

double ReactionTerm::profile(double t, double u) const {
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  double g = u * (1.0 - u);
  switch (kind) {
    case ReactionKind::kpp:
      return g;
    case ReactionKind::monostable:
      return g * u;
    case ReactionKind::combustion:
      return u > theta ? (u - theta) * (1.0 - u) : 0.0;
    case ReactionKind::bistable:
      return g * (u - theta);
    case ReactionKind::ap_time:
      return g * (u - theta_at(t));
    case ReactionKind::multistable:
      for (double z : zeros) g *= (u - z);
      return g;
  }
  return 0.0;
}

double ReactionTerm::profile_deriv(double t, double u) const {
  // One-sided at the ends of [0, 1]: the zero extension is only used for
  // evaluation, the linearization at 0 and 1 is taken from inside.
  if (u < 0.0 || u > 1.0) return 0.0;
  switch (kind) {
    case ReactionKind::combustion:
      return u > theta ? (1.0 - u) - (u - theta) : 0.0;
    case ReactionKind::ap_time: {
      double th = theta_at(t);
      return (1.0 - 2.0 * u) * (u - th) + u * (1.0 - u);
    }
    default: {
      auto p = polynomial_of(*this);
      double s = 0.0;
      for (std::size_t k = p.size() - 1; k >= 1; --k) {
        s = s * u + static_cast<double>(k) * p[k];
      }
      return s;
    }
  }
}

double ReactionTerm::lipschitz() const {
  double worst = 0.0;
  std::vector<double> thetas = {theta};
  if (kind == ReactionKind::ap_time)
    thetas = {theta - 2.0 * amplitude, theta, theta + 2.0 * amplitude};
  for (double th : thetas) {
    ReactionTerm frozen = *this;
    if (kind == ReactionKind::ap_time) {
      frozen.amplitude = 0.0;
      frozen.theta = th;
    }
    for (int i = 0; i <= 2000; ++i) {
      double u = i / 2000.0;
      worst = std::max(worst, std::abs(frozen.profile_deriv(0.0, u)));
    }
  }
  return 1.01 * std::abs(scale) * (1.0 + std::abs(modulation)) * worst;
}

double ReactionTerm::primitive(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (kind == ReactionKind::combustion) {
    if (u <= theta) return 0.0;
    double w = u - theta;
    return scale * ((1.0 - theta) * w * w / 2.0 - w * w * w / 3.0);
  }
  auto p = polynomial_of(*this);
  if (kind == ReactionKind::ap_time && amplitude != 0.0)
    throw ModelError("primitive requires an autonomous reaction");
  std::vector<double> integral(p.size() + 1, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) integral[k + 1] = p[k] / static_cast<double>(k + 1);
  return scale * horner(integral, u);
}

void ReactionTerm::validate() const {
  if (!std::isfinite(scale) || scale <= 0.0) throw ModelError("reaction scale must be positive");
  if (!std::isfinite(modulation) || std::abs(modulation) >= 1.0)
    throw ModelError("spatial modulation amplitude must lie in (-1, 1)");
  switch (kind) {
    case ReactionKind::combustion:
    case ReactionKind::bistable:
      require_level(theta, 0.0, 1.0, "theta");
      break;
    case ReactionKind::ap_time:
      require_level(theta, 0.0, 1.0, "mean theta");
      if (!(amplitude >= 0.0)) throw ModelError("ap_time amplitude must be nonnegative");
      break;
    case ReactionKind::multistable:
      if (zeros.empty()) throw ModelError("multistable reaction needs interior zeros");
      for (std::size_t i = 0; i < zeros.size(); ++i) {
        require_level(zeros[i], 0.0, 1.0, "multistable zero");
        if (i > 0 && zeros[i] <= zeros[i - 1])
          throw ModelError("multistable zeros must be strictly ascending");
      }
      break;
    default:
      break;
  }
}

// ------------------------------------------------------------------ catalog

const Expectation* Model::expectation(std::string_view quantity) const {
  for (const auto& e : expectations)
    if (e.quantity == quantity) return &e;
  return nullptr;
}

// Quintic catalog constants. The lower wave (theta1 -> 0) is the faster one,
// so the minimal terrace keeps both tiers.
namespace quintic {
constexpr double kLowerUnstable = 0.08;
constexpr double kMiddle = 0.5;
constexpr double kUpperUnstable = 0.72;
constexpr double kScale = 24.0;
}  // namespace quintic

std::vector<std::string> catalog_names() {
  return {"homogeneous_kpp", "sinusoidal_kpp",      "cubic_bistable",
          "combustion",      "quintic_multistable", "ap_time_bistable"};
}

Model builtin_model(std::string_view name, const ModelOverrides& ov) {
  Model m;
  m.name = std::string(name);
  const double sqrt2 = std::numbers::sqrt2;

  if (name == "homogeneous_kpp") {
    m.reaction = ReactionTerm::kpp(ov.scale.value_or(1.0));
    double c = 2.0 * std::sqrt(m.reaction.scale);
    m.expectations = {{"c_star", c, 1e-4, "closed form: min over lambda of lambda + 1/lambda"},
                      {"lambda_star", std::sqrt(m.reaction.scale), 1e-3, "closed form"}};
  } else if (name == "sinusoidal_kpp") {
    m.reaction = ReactionTerm::kpp(ov.scale.value_or(1.0));
    m.reaction.modulation = ov.modulation.value_or(0.5);
    if (m.reaction.modulation == 0.5 && m.reaction.scale == 1.0) {
      m.expectations = {
          {"k0_continuum", 1.0031660638, 2e-6,
           "oracle: dense eigensolver at 64/128/256 cells, Richardson extrapolated"},
          {"k0_cell64", 1.0031686087, 1e-9, "oracle: dense eigensolver, 64 cells"},
          {"c_star_e1", 2.0028746782, 1e-4, "oracle: dense eigensolver lambda scan, 64 cells"},
          {"lambda_star_e1", 1.0017019, 1e-3, "oracle: dense eigensolver lambda scan, 64 cells"},
          {"c_star_e2", 2.0031680798, 1e-4,
           "oracle: x2-independent reduction, 2 sqrt(k0) with k0 dense at 48 cells"}};
    }
  } else if (name == "cubic_bistable") {
    double th = ov.theta.value_or(0.3);
    m.reaction = ReactionTerm::bistable(th, ov.scale.value_or(1.0));
    m.expectations = {{"wave_speed", std::sqrt(m.reaction.scale) * (1.0 - 2.0 * th) / sqrt2,
                       1e-5, "closed form: profile 1/(1+exp(x/sqrt2))"}};
  } else if (name == "combustion") {
    double th = ov.theta.value_or(0.3);
    m.reaction = ReactionTerm::combustion(th, ov.scale.value_or(1.0));
  } else if (name == "quintic_multistable") {
    m.reaction = ReactionTerm::multistable(
        {quintic::kLowerUnstable, ov.theta.value_or(quintic::kMiddle), quintic::kUpperUnstable},
        ov.scale.value_or(quintic::kScale));
    if (!ov.theta && !ov.scale) {
      m.expectations = {
          {"theta1", quintic::kMiddle, 0.02, "catalog construction"},
          {"c1", 0.6547180021, 1e-6, "oracle: fine-tolerance shooting, tier 0.5 -> 0"},
          {"c2", 0.3159296748, 1e-6, "oracle: fine-tolerance shooting, tier 1 -> 0.5"}};
    }
  } else if (name == "ap_time_bistable") {
    double th = ov.theta.value_or(0.25);
    double amp = ov.amplitude.value_or(0.05);
    m.reaction = ReactionTerm::ap_time(th, amp);
    if (amp == 0.0)
      m.expectations = {{"front_speed", (1.0 - 2.0 * th) / sqrt2, 0.02, "closed form"}};
    else if (th == 0.25 && amp == 0.05)
      m.expectations = {
          {"front_speed", 0.3535323, 0.02, "oracle: moving-window solver, T = 2000, h = 0.05"}};
  } else {
    throw ModelError("unknown catalog model '" + std::string(name) + "'");
  }
  if (ov.modulation && name != "sinusoidal_kpp") m.reaction.modulation = *ov.modulation;
  m.reaction.validate();
  return m;
}

// ---------------------------------------------------- PeriodicCoefficients

std::size_t PeriodicCoefficients::index(int i, int j) const {
  int ii = ((i % n) + n) % n;
  if (dim == 1) return static_cast<std::size_t>(ii);
  int jj = ((j % n) + n) % n;
  return static_cast<std::size_t>(ii) + static_cast<std::size_t>(n) * jj;
}

Vec2 PeriodicCoefficients::node(std::size_t k) const {
  int i = static_cast<int>(k % n);
  int j = dim == 2 ? static_cast<int>(k / n) : 0;
  return {static_cast<double>(i) / n, static_cast<double>(j) / n};
}

PeriodicCoefficients PeriodicCoefficients::sample(const CoefficientSpec& spec,
                                                  const ReactionTerm& reaction, int dim, int n) {
  if (dim != 1 && dim != 2) throw ModelError("coefficient dimension must be 1 or 2");
  if (n < 8 || n % 2 != 0) throw ModelError("cells_per_period must be even and at least 8");
  PeriodicCoefficients c;
  c.dim = dim;
  c.n = n;
  std::size_t size = dim == 2 ? static_cast<std::size_t>(n) * n : n;
  c.a11.resize(size);
  c.lin.resize(size);
  c.q1.assign(size, 0.0);
  if (dim == 2) {
    c.a12.resize(size);
    c.a22.resize(size);
    c.q2.assign(size, 0.0);
  }
  for (std::size_t k = 0; k < size; ++k) {
    Vec2 x = c.node(k);
    auto a = spec.diffusion_at(x);
    Vec2 q = spec.advection_at(x, dim);
    c.a11[k] = a[0];
    c.q1[k] = q[0];
    if (dim == 2) {
      c.a12[k] = a[1];
      c.a22[k] = a[2];
      c.q2[k] = q[1];
    }
    c.lin[k] = reaction.linearization_at_zero(x);
  }
  return c;
}

CoefficientReport validate_coefficients(const PeriodicCoefficients& c) {
  CoefficientReport r;
  const std::size_t size = c.lin.size();
  auto fail = [&](const std::string& msg) { r.failures.push_back(msg); };
  auto sized = [&](const std::vector<double>& v) { return v.size() == size; };
  if (size == 0 || !sized(c.a11) || !sized(c.q1) ||
      (c.dim == 2 && (!sized(c.a12) || !sized(c.a22) || !sized(c.q2)))) {
    fail("coefficient fields are not sampled on a common grid");
    return r;
  }

  r.a_min = std::numeric_limits<double>::infinity();
  r.a_max = -std::numeric_limits<double>::infinity();
  Vec2 mean = {0.0, 0.0};
  for (std::size_t k = 0; k < size; ++k) {
    double a11 = c.a11[k];
    double a12 = c.dim == 2 ? c.a12[k] : 0.0;
    double a22 = c.dim == 2 ? c.a22[k] : a11;
    double q1 = c.q1[k];
    double q2 = c.dim == 2 ? c.q2[k] : 0.0;
    if (!std::isfinite(a11) || !std::isfinite(a12) || !std::isfinite(a22) || !std::isfinite(q1) ||
        !std::isfinite(q2) || !std::isfinite(c.lin[k])) {
      std::ostringstream os;
      os << "non-finite coefficient at node " << k;
      fail(os.str());
      continue;
    }
    double lo = a11, hi = a11;
    if (c.dim == 2) {
      double m = 0.5 * (a11 + a22);
      double d = std::hypot(0.5 * (a11 - a22), a12);
      lo = m - d;
      hi = m + d;
    }
    if (lo <= 0.0 && r.a_min > 0.0) {
      Vec2 x = c.node(k);
      std::ostringstream os;
      os << "diffusion not uniformly elliptic at x = (" << x[0] << ", " << x[1]
         << "): smallest eigenvalue " << lo;
      fail(os.str());
    }
    r.a_min = std::min(r.a_min, lo);
    r.a_max = std::max(r.a_max, hi);
    r.max_advection = std::max(r.max_advection, std::hypot(q1, q2));
    mean[0] += q1;
    mean[1] += q2;
  }
  mean[0] /= static_cast<double>(size);
  mean[1] /= static_cast<double>(size);
  r.mean_advection = std::hypot(mean[0], mean[1]);

  const double inv2h = c.n / 2.0;
  std::size_t worst = 0;
  for (int j = 0; j < (c.dim == 2 ? c.n : 1); ++j) {
    for (int i = 0; i < c.n; ++i) {
      double div = (c.q1[c.index(i + 1, j)] - c.q1[c.index(i - 1, j)]) * inv2h;
      if (c.dim == 2) div += (c.q2[c.index(i, j + 1)] - c.q2[c.index(i, j - 1)]) * inv2h;
      if (std::abs(div) > r.max_divergence) {
        r.max_divergence = std::abs(div);
        worst = c.index(i, j);
      }
    }
  }

  if (r.max_divergence > 1e-8 * r.max_advection) {
    Vec2 x = c.node(worst);
    std::ostringstream os;
    os << "advection field is not divergence free: |div q| = " << r.max_divergence
       << " at x = (" << x[0] << ", " << x[1] << ")";
    fail(os.str());
  }
  if (r.mean_advection > 1e-8 * std::max(1.0, r.max_advection)) {
    std::ostringstream os;
    os << "advection field has nonzero cell average, norm " << r.mean_advection;
    fail(os.str());
  }
  return r;
}

}  // namespace wulffspread
