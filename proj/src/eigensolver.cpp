#include "wulffspread/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

namespace wulffspread {

namespace {

using Vector = Eigen::VectorXd;

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
  bool positive = false;
};

// Collatz-Wielandt bounds: min and max of (op v)_i / v_i over a positive v.
Bounds collatz_wielandt(const SparseOperator& op, const Vector& v) {
  Vector w = op * v;
  Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           v.minCoeff() > 0.0};
  if (!b.positive) return b;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double r = w[i] / v[i];
    b.lo = std::min(b.lo, r);
    b.hi = std::max(b.hi, r);
  }
  return b;
}

class ShiftedResolvent {
 public:
  explicit ShiftedResolvent(const SparseOperator& op) : op_(op) {
    identity_.resize(op.rows(), op.cols());
    identity_.setIdentity();
  }

  void factor(double sigma) {
    Eigen::SparseMatrix<double> m = sigma * identity_ - Eigen::SparseMatrix<double>(op_);
    m.makeCompressed();
    lu_.compute(m);
    if (lu_.info() != Eigen::Success)
      throw NumericalError("resolvent factorization failed (shift on the spectrum)");
    sigma_ = sigma;
    ++factorizations_;
  }

  Vector solve(const Vector& v) const { return lu_.solve(v); }
  double sigma() const { return sigma_; }
  int factorizations() const { return factorizations_; }

 private:
  const SparseOperator& op_;
  Eigen::SparseMatrix<double> identity_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  double sigma_ = 0.0;
  int factorizations_ = 0;
};

}  // namespace

GridSpec default_cell_grid(int dim) { return GridSpec::cell(dim, dim == 1 ? 64 : 48); }

CellOperator assemble_cell_operator(const PeriodicCoefficients& c, Vec2 z,
                                    const GridSpec& cell_grid) {
  if (c.dim != cell_grid.dim || c.n != cell_grid.cells_per_period)
    throw ModelError("cell operator: coefficient sampling does not match the cell grid");
  if (c.dim == 1 && z[1] != 0.0) throw ModelError("cell operator: 1D frequency must have z2 = 0");
  for (const auto* field : {&c.a11, &c.q1, &c.lin})
    for (double v : *field)
      if (!std::isfinite(v)) throw ModelError("cell operator: non-finite coefficient sample");
  if (!std::isfinite(z[0]) || !std::isfinite(z[1]))
    throw ModelError("cell operator: non-finite frequency");

  const int n = c.n;
  const double ih2 = static_cast<double>(n) * n;
  const double i2h = n / 2.0;
  const std::size_t size = c.size();

  CellOperator op;
  op.dim = c.dim;
  op.n = n;
  op.z = z;
  op.zeroth_order.resize(size);

  // (Az) sampled on the grid, then differenced for div(Az).
  std::vector<double> az1(size), az2(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    if (c.dim == 1) {
      az1[k] = c.a11[k] * z[0];
    } else {
      az1[k] = c.a11[k] * z[0] + c.a12[k] * z[1];
      az2[k] = c.a12[k] * z[0] + c.a22[k] * z[1];
    }
  }

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(size * (c.dim == 1 ? 3 : 9));
  const int rows = c.dim == 2 ? n : 1;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<int>(c.index(i, j));
      auto add = [&](int ii, int jj, double v) {
        entries.emplace_back(k, static_cast<int>(c.index(ii, jj)), v);
      };

      // div(A grad) in flux form, half-node averaged coefficients.
      double ap = 0.5 * (c.a11[k] + c.a11[c.index(i + 1, j)]);
      double am = 0.5 * (c.a11[k] + c.a11[c.index(i - 1, j)]);
      add(i + 1, j, ap * ih2);
      add(i - 1, j, am * ih2);
      add(i, j, -(ap + am) * ih2);

      double zaz = az1[k] * z[0];
      double divaz = (az1[c.index(i + 1, j)] - az1[c.index(i - 1, j)]) * i2h;
      double b1 = c.q1[k] - 2.0 * az1[k];
      add(i + 1, j, b1 * i2h);
      add(i - 1, j, -b1 * i2h);
      double qz = c.q1[k] * z[0];

      if (c.dim == 2) {
        double bp = 0.5 * (c.a22[k] + c.a22[c.index(i, j + 1)]);
        double bm = 0.5 * (c.a22[k] + c.a22[c.index(i, j - 1)]);
        add(i, j + 1, bp * ih2);
        add(i, j - 1, bm * ih2);
        add(i, j, -(bp + bm) * ih2);

        // d1(a12 d2 phi) + d2(a12 d1 phi)
        const double w = ih2 / 4.0;
        double e = c.a12[c.index(i + 1, j)] * w;
        double west = c.a12[c.index(i - 1, j)] * w;
        double north = c.a12[c.index(i, j + 1)] * w;
        double south = c.a12[c.index(i, j - 1)] * w;
        if (e != 0.0 || west != 0.0 || north != 0.0 || south != 0.0) {
          add(i + 1, j + 1, e + north);
          add(i + 1, j - 1, -e - south);
          add(i - 1, j + 1, -west - north);
          add(i - 1, j - 1, west + south);
        }

        zaz += az2[k] * z[1];
        divaz += (az2[c.index(i, j + 1)] - az2[c.index(i, j - 1)]) * i2h;
        double b2 = c.q2[k] - 2.0 * az2[k];
        add(i, j + 1, b2 * i2h);
        add(i, j - 1, -b2 * i2h);
        qz += c.q2[k] * z[1];
      }

      double zeroth = zaz - divaz - qz + c.lin[k];
      op.zeroth_order[k] = zeroth;
      add(i, j, zeroth);
    }
  }
  op.matrix.resize(static_cast<int>(size), static_cast<int>(size));
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  op.matrix.makeCompressed();
  return op;
}

PrincipalEigenpair principal_eigenvalue(const CellOperator& op, const EigenOptions& options) {
  const SparseOperator& a = op.matrix;
  const Eigen::Index size = a.rows();
  double max_diag = 0.0;
  double gershgorin = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < size; ++i) {
    double row = 0.0;
    for (SparseOperator::InnerIterator it(a, i); it; ++it)
      row += it.col() == i ? it.value() : std::abs(it.value());
    gershgorin = std::max(gershgorin, row);
    max_diag = std::max(max_diag, std::abs(a.coeff(i, i)));
  }
  // Conservative resolvent parameter tau = 0.1 / (1 + max|diag|); the shift
  // sigma = 1 / tau is then tightened towards k from above using
  // Collatz-Wielandt bounds of the current iterate. At large |z| the diagonal
  // cancels and 1 / tau can fall below k, so the cap never goes under the
  // Gershgorin bound.
  const double sigma_safe = std::max((1.0 + max_diag) / 0.1, gershgorin + 1.0);

  std::ostringstream failure;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const double margin_factor = std::pow(10.0, attempt);
    ShiftedResolvent resolvent(a);
    Vector v = Vector::Ones(size);

    auto tightened_shift = [&](const Bounds& b) {
      double spread = std::max(b.hi - b.lo, 1e-6 * (1.0 + std::abs(b.hi)));
      return std::min(sigma_safe, b.hi + margin_factor * spread);
    };

    Bounds bounds = collatz_wielandt(a, v);
    resolvent.factor(tightened_shift(bounds));

    double k_prev = std::numeric_limits<double>::quiet_NaN();
    bool lost_positivity = false;
    for (int it = 1; it <= options.max_iterations; ++it) {
      Vector w = resolvent.solve(v);
      double mu = v.dot(w) / v.dot(v);
      double k = resolvent.sigma() - 1.0 / mu;
      double wmax = w.maxCoeff();
      if (!(mu > 0.0) || !(wmax > 0.0) || !std::isfinite(k)) {
        lost_positivity = true;
        failure << "attempt " << attempt << ": resolvent estimate left the positive cone; ";
        break;
      }
      v = w / wmax;
      if (v.minCoeff() < -1e-12) {
        lost_positivity = true;
        failure << "attempt " << attempt << ": eigenfunction entry " << v.minCoeff()
                << " below -1e-12; ";
        break;
      }

      bool converged = std::abs(k - k_prev) < options.tolerance * (1.0 + std::abs(k));
      k_prev = k;
      if (converged) {
        double residual = (a * v - k * v).cwiseAbs().maxCoeff();
        if (residual <= 1e-8 * (std::abs(k) + 1.0)) {
          PrincipalEigenpair pair;
          pair.z = op.z;
          pair.k = k;
          pair.phi.assign(v.data(), v.data() + size);
          pair.residual = residual;
          pair.iterations = it;
          pair.factorizations = resolvent.factorizations();
          if (v.minCoeff() <= 0.0) {
            failure << "attempt " << attempt << ": eigenfunction not strictly positive; ";
            lost_positivity = true;
            break;
          }
          return pair;
        }
      }

      bounds = collatz_wielandt(a, v);
      if (bounds.positive) {
        double next = tightened_shift(bounds);
        double current_gap = resolvent.sigma() - bounds.hi;
        if (next - bounds.hi < 0.5 * current_gap && resolvent.factorizations() < 40)
          resolvent.factor(next);
      }
    }
    if (!lost_positivity) {
      std::ostringstream os;
      os << "principal eigenvalue did not converge in " << options.max_iterations
         << " iterations";
      throw NumericalError(os.str());
    }
  }
  throw NumericalError("principal eigenvalue failed after retries: " + failure.str());
}

double principal_eigenvalue_at(const PeriodicCoefficients& coeffs, Vec2 z,
                               const GridSpec& cell_grid) {
  return principal_eigenvalue(assemble_cell_operator(coeffs, z, cell_grid)).k;
}

CriticalSpeed critical_speed(const PeriodicCoefficients& coeffs, Vec2 e, const GridSpec& cell_grid,
                             const SpeedSearchOptions& options) {
  double norm = std::hypot(e[0], e[1]);
  if (!(norm > 0.0)) throw ModelError("critical speed: direction must be nonzero");
  e = {e[0] / norm, e[1] / norm};
  if (coeffs.dim == 1 && std::abs(e[1]) > 0.0)
    throw ModelError("critical speed: 1D directions are +1 or -1");

  CriticalSpeed result;
  result.e = e;
  auto g = [&](double lambda) {
    double k = principal_eigenvalue_at(coeffs, {lambda * e[0], lambda * e[1]}, cell_grid);
    double value = k / lambda;
    result.trace.push_back({lambda, value});
    return value;
  };

  double a = options.initial_lo, b = options.initial_hi;
  double m = std::sqrt(a * b);
  double ga = g(a), gb = g(b), gm = g(m);
  while (!(ga > gm && gb > gm)) {
    if (ga <= gm && ga <= gb) {
      b = m, gb = gm;
      m = a, gm = ga;
      a /= 2.0;
      if (a < options.limit_lo)
        throw NumericalError("critical speed: bracket expansion below lambda = 1e-6; "
                             "k(lambda e)/lambda is not coercive for this model");
      ga = g(a);
    } else {
      a = m, ga = gm;
      m = b, gm = gb;
      b *= 2.0;
      if (b > options.limit_hi)
        throw NumericalError("critical speed: bracket expansion above lambda = 1e6; "
                             "k(lambda e)/lambda is not coercive for this model");
      gb = g(b);
    }
  }

  // Golden-section search in log(lambda).
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(a), hi = std::log(b);
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double g1 = g(std::exp(x1)), g2 = g(std::exp(x2));
  while (hi - lo > options.relative_tolerance) {
    if (g1 <= g2) {
      hi = x2;
      x2 = x1, g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = g(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2, g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = g(std::exp(x2));
    }
  }
  result.bracket_lo = std::exp(lo);
  result.bracket_hi = std::exp(hi);

  auto best = std::min_element(result.trace.begin(), result.trace.end(),
                               [](const SpeedProbe& p, const SpeedProbe& q) { return p.g < q.g; });
  result.c_star = best->g;
  result.lambda_star = best->lambda;
  return result;
}

}  // namespace wulffspread
