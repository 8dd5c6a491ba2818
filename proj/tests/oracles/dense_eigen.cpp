#include "oracles/dense_eigen.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

namespace wulffspread::oracle {

double dense_principal_eigenvalue(const CellOperator& op) {
  Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, false);
  if (solver.info() == Eigen::Success) return solver.eigenvalues().real().maxCoeff();
  // The real QR iteration occasionally stalls on these tilted operators;
  // the complex Schur route has different shifts and converges there.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> complex_solver(dense.cast<std::complex<double>>(),
                                                             false);
  if (complex_solver.info() != Eigen::Success)
    throw NumericalError("dense eigensolver did not converge");
  return complex_solver.eigenvalues().real().maxCoeff();
}

double dense_k(const PeriodicCoefficients& coeffs, Vec2 z, const GridSpec& cell_grid) {
  return dense_principal_eigenvalue(assemble_cell_operator(coeffs, z, cell_grid));
}

ScanResult lambda_scan(const PeriodicCoefficients& coeffs, Vec2 e, const GridSpec& cell_grid,
                       int samples, double lambda_lo, double lambda_hi) {
  std::vector<double> s(samples), g(samples);
  double step = std::log(lambda_hi / lambda_lo) / (samples - 1);
  std::size_t best = 0;
  for (int i = 0; i < samples; ++i) {
    s[i] = std::log(lambda_lo) + i * step;
    double lambda = std::exp(s[i]);
    g[i] = dense_k(coeffs, {lambda * e[0], lambda * e[1]}, cell_grid) / lambda;
    if (g[i] < g[best]) best = static_cast<std::size_t>(i);
  }
  if (best == 0 || best + 1 == static_cast<std::size_t>(samples)) return {g[best], std::exp(s[best])};
  // Vertex of the parabola through (s[best-1], s[best], s[best+1]).
  double gm = g[best - 1], g0 = g[best], gp = g[best + 1];
  double denom = gm - 2.0 * g0 + gp;
  double offset = 0.5 * (gm - gp) / denom;
  double vertex = g0 - 0.25 * (gm - gp) * offset;
  return {vertex, std::exp(s[best] + offset * step)};
}

}  // namespace wulffspread::oracle
