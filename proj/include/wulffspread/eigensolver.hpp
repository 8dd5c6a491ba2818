#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "wulffspread/model.hpp"

namespace wulffspread {

using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discretization of the tilted operator
///   L_z phi = div(A grad phi) - 2 z.A grad phi + q.grad phi
///             + (z.Az - div(Az) - q.z + d_u f(x, 0)) phi
/// on the periodic cell grid, second-order central differences throughout.
struct CellOperator {
  int dim = 1;
  int n = 0;
  Vec2 z = {0.0, 0.0};
  SparseOperator matrix;
  /// Zeroth-order coefficient sampled directly, for consistency checks.
  std::vector<double> zeroth_order;
};

CellOperator assemble_cell_operator(const PeriodicCoefficients& coeffs, Vec2 z,
                                    const GridSpec& cell_grid);

struct PrincipalEigenpair {
  Vec2 z = {0.0, 0.0};
  double k = 0.0;
  std::vector<double> phi;  // positive, max phi = 1
  double residual = 0.0;    // max |L phi - k phi|
  int iterations = 0;
  int factorizations = 0;
};

struct EigenOptions {
  int max_iterations = 50000;
  double tolerance = 1e-12;
  int max_retries = 3;
};

/// Principal eigenvalue by shifted resolvent power iteration. Throws
/// NumericalError on non-convergence or loss of positivity.
PrincipalEigenpair principal_eigenvalue(const CellOperator& op, const EigenOptions& options = {});

/// k(z) for the given coefficients.
double principal_eigenvalue_at(const PeriodicCoefficients& coeffs, Vec2 z,
                               const GridSpec& cell_grid);

struct SpeedProbe {
  double lambda = 0.0;
  double g = 0.0;  // k(lambda e) / lambda
};

struct CriticalSpeed {
  Vec2 e = {1.0, 0.0};
  double c_star = 0.0;
  double lambda_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<SpeedProbe> trace;
};

struct SpeedSearchOptions {
  double initial_lo = 1e-2;
  double initial_hi = 1e2;
  double limit_lo = 1e-6;
  double limit_hi = 1e6;
  double relative_tolerance = 1e-6;
};

/// c*(e) = min over lambda > 0 of k(lambda e) / lambda. Valid for KPP
/// reactions only; callers must route other classes elsewhere.
CriticalSpeed critical_speed(const PeriodicCoefficients& coeffs, Vec2 e, const GridSpec& cell_grid,
                             const SpeedSearchOptions& options = {});

/// Default cell grid for the eigenvalue route: 64 (1D) or 48^2 (2D).
GridSpec default_cell_grid(int dim);

}  // namespace wulffspread
