#pragma once

// Collocation solution of the boundary-layer Euler-Lagrange equation
// V * nu = g on (0, inf) with a step-function ansatz on a geometric grid.

#include "pileup/continuum.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace pileup::boundary_layer {

/// Geometric grid with |I_i| = C b^i, i = 1..N, a_0 = 0.
class CollocationGrid {
 public:
  /// Throws ConstructionError unless C > 0, b > 1 and N >= 1.
  CollocationGrid(double C, double b, int N);

  double C() const noexcept { return C_; }
  double b() const noexcept { return b_; }
  int N() const noexcept { return N_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& midpoints() const noexcept { return midpoints_; }
  /// a_N from the closed-form geometric sum C b (b^N - 1) / (b - 1).
  double reach_closed_form() const;
  /// 1-based index of the cell (a_{i-1}, a_i] holding x, or 0 if x is outside (0, a_N].
  int cell_containing(double x) const;
  /// Every cell split in two: b -> sqrt(b), N -> 2N, original breakpoints kept.
  CollocationGrid refined() const;

 private:
  double C_;
  double b_;
  int N_;
  std::vector<double> breakpoints_;
  std::vector<double> midpoints_;
};

struct GridTargets {
  double a1 = 3e-5;           ///< first breakpoint
  double width_at_one = 0.1;  ///< width of the cell containing x = 1
  double reach = 200.0;       ///< point that must lie in the last cell
};

/// Solves for (C, b, N): picks b so that the cell containing 1 has exactly the
/// target width given a_1 (the finest such grid), then the smallest N whose
/// last cell holds `reach`. Throws ConstructionError when infeasible.
CollocationGrid build_grid(const GridTargets& targets = {});

struct LinearSystem {
  Eigen::MatrixXd matrix;  ///< M(j, i) = Phi(y_j - a_{i-1}) - Phi(y_j - a_i)
  Eigen::VectorXd rhs;     ///< g(y_j)
};

LinearSystem assemble_system(const CollocationGrid& grid);

struct BoundaryLayerSolution {
  CollocationGrid grid;
  continuum::PiecewiseConstantDensity nu_star;
  std::vector<std::pair<double, double>> residual_report;  ///< (y_j, (V * nu)(y_j) - g(y_j))
  double condition_estimate;
  bool lower_bound_ok;  ///< inf nu_* > -rho_*(0)

  double lambda(int i) const { return nu_star.value(i); }
};

/// Dense LU with partial pivoting plus one refinement sweep. Throws
/// SolverError when the condition estimate exceeds 1e14.
BoundaryLayerSolution solve_nu_star(const CollocationGrid& grid);

/// r(x) = (V * nu_*)(x) - g(x).
std::vector<double> el_residual(const BoundaryLayerSolution& sol, const std::vector<double>& points);

/// rho_*(x) + nu_*(gamma x), with nu_* = 0 beyond a_N.
double matched_density(const BoundaryLayerSolution& sol, double gamma, double x);

/// Piecewise-linear interpolation through (y_j, lambda_j), zero beyond a_N.
double affine_profile(const BoundaryLayerSolution& sol, double x);

struct DipMetrics {
  double min_value;
  double min_location;
  int sign_changes;
};

/// Sign changes are counted over cells with |lambda| > 1e-10 max|lambda|;
/// the far tail is at rounding level and its signs carry no information.
DipMetrics dip_metrics(const BoundaryLayerSolution& sol);

/// int nu_* over [0, a_N].
double mass(const BoundaryLayerSolution& sol);

}  // namespace pileup::boundary_layer
