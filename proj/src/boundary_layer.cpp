#include "pileup/boundary_layer.hpp"

#include "pileup/errors.hpp"
#include "pileup/potential.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pileup::boundary_layer {

namespace {

constexpr double kMaxCondition = 1e14;

// a_k = a1 (b^k - 1) / (b - 1).
double breakpoint(double a1, double b, int k) { return a1 * std::expm1(k * std::log(b)) / (b - 1.0); }

}  // namespace

CollocationGrid::CollocationGrid(double C, double b, int N) : C_(C), b_(b), N_(N) {
  if (!(C > 0.0) || !(b > 1.0) || N < 1 || !std::isfinite(C) || !std::isfinite(b)) {
    throw ConstructionError("a geometric grid needs C > 0, b > 1 and N >= 1");
  }
  breakpoints_.resize(static_cast<std::size_t>(N) + 1);
  midpoints_.resize(static_cast<std::size_t>(N));
  breakpoints_[0] = 0.0;
  double width = C;
  for (int i = 1; i <= N; ++i) {
    width *= b;
    breakpoints_[static_cast<std::size_t>(i)] = breakpoints_[static_cast<std::size_t>(i) - 1] + width;
    midpoints_[static_cast<std::size_t>(i) - 1] =
        0.5 * (breakpoints_[static_cast<std::size_t>(i) - 1] + breakpoints_[static_cast<std::size_t>(i)]);
  }
}

double CollocationGrid::reach_closed_form() const { return breakpoint(C_ * b_, b_, N_); }

int CollocationGrid::cell_containing(double x) const {
  if (!(x > 0.0) || x > breakpoints_.back()) return 0;
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return static_cast<int>(it - breakpoints_.begin());
}

CollocationGrid CollocationGrid::refined() const {
  const double root = std::sqrt(b_);
  return CollocationGrid(C_ / (1.0 + 1.0 / root), root, 2 * N_);
}

CollocationGrid build_grid(const GridTargets& t) {
  constexpr double kPoint = 1.0;
  if (!(t.a1 > 0.0 && t.width_at_one > 0.0 && t.reach > 0.0)) {
    throw ConstructionError("grid targets must be positive");
  }
  if (!(t.width_at_one < t.reach)) throw ConstructionError("width_at_one must be smaller than reach");
  if (!(t.a1 < t.width_at_one) || !(t.a1 < kPoint) || !(kPoint < t.reach)) {
    throw ConstructionError("grid targets need a1 < width_at_one, a1 < 1 < reach");
  }

  // With w = a1 b^{j-1} the ratio is fixed by the index j of the cell that
  // holds 1; j is admissible when a_{j-1} < 1 <= a_j for that ratio. The
  // largest admissible j gives the finest grid.
  const double log_ratio = std::log(t.width_at_one / t.a1);
  int best = 0;
  double best_b = 0.0;
  for (int j = 2; j < 100000; ++j) {
    const double b = std::exp(log_ratio / (j - 1));
    if (b - 1.0 < 1e-12) break;
    if (breakpoint(t.a1, b, j - 1) < kPoint && kPoint <= breakpoint(t.a1, b, j)) {
      best = j;
      best_b = b;
    }
  }
  if (best == 0) throw ConstructionError("no geometric grid meets the width target at x = 1");

  const double b = best_b;
  int N = best;
  while (breakpoint(t.a1, b, N) < t.reach) ++N;
  return CollocationGrid(t.a1 / b, b, N);
}

LinearSystem assemble_system(const CollocationGrid& grid) {
  const int n = grid.N();
  const auto& a = grid.breakpoints();
  const auto& y = grid.midpoints();
  LinearSystem sys{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  for (int j = 0; j < n; ++j) {
    const double yj = y[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      sys.matrix(j, i) = potential::integral(yj - a[static_cast<std::size_t>(i) + 1], yj - a[static_cast<std::size_t>(i)]);
    }
    sys.rhs[j] = potential::g(yj);
  }
  return sys;
}

BoundaryLayerSolution solve_nu_star(const CollocationGrid& grid) {
  const LinearSystem sys = assemble_system(grid);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) {
    std::ostringstream os;
    os << "collocation matrix is ill-conditioned (condition estimate " << condition << ", N = " << grid.N() << ")";
    throw SolverError(os.str(), condition);
  }
  Eigen::VectorXd lambda = lu.solve(sys.rhs);
  lambda += lu.solve(sys.rhs - sys.matrix * lambda);

  const Eigen::VectorXd residual = sys.matrix * lambda - sys.rhs;
  std::vector<std::pair<double, double>> report;
  report.reserve(static_cast<std::size_t>(grid.N()));
  for (int j = 0; j < grid.N(); ++j) report.emplace_back(grid.midpoints()[static_cast<std::size_t>(j)], residual[j]);

  std::vector<double> values(lambda.data(), lambda.data() + lambda.size());
  const double floor0 = continuum::rho_star(0.0, continuum::kUnrescaled);
  const bool lower_ok = *std::min_element(values.begin(), values.end()) > -floor0;
  continuum::PiecewiseConstantDensity nu(grid.breakpoints(), std::move(values));
  return BoundaryLayerSolution{grid, std::move(nu), std::move(report), condition, lower_ok};
}

std::vector<double> el_residual(const BoundaryLayerSolution& sol, const std::vector<double>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (double x : points) out.push_back(continuum::convolve_V(sol.nu_star, x) - potential::g(x));
  return out;
}

double matched_density(const BoundaryLayerSolution& sol, double gamma, double x) {
  if (!(gamma > 0.0)) throw DomainError("matched density needs gamma > 0");
  return continuum::rho_star(x, continuum::kUnrescaled) + sol.nu_star.at(gamma * x);
}

double affine_profile(const BoundaryLayerSolution& sol, double x) {
  const auto& y = sol.grid.midpoints();
  const auto& v = sol.nu_star.values();
  if (x < 0.0 || x > sol.grid.breakpoints().back()) return 0.0;
  if (x <= y.front()) return v.front();
  if (x >= y.back()) return v.back();
  const auto it = std::upper_bound(y.begin(), y.end(), x);
  const auto k = static_cast<std::size_t>(it - y.begin());
  const double t = (x - y[k - 1]) / (y[k] - y[k - 1]);
  return (1.0 - t) * v[k - 1] + t * v[k];
}

DipMetrics dip_metrics(const BoundaryLayerSolution& sol) {
  const auto& v = sol.nu_star.values();
  const auto min_it = std::min_element(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(min_it - v.begin());
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  const double floor = 1e-10 * peak;
  int changes = 0;
  int last_sign = 0;
  for (double x : v) {
    if (std::abs(x) <= floor) continue;
    const int s = x > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return DipMetrics{*min_it, sol.grid.midpoints()[idx], changes};
}

double mass(const BoundaryLayerSolution& sol) { return sol.nu_star.mass(); }

}  // namespace pileup::boundary_layer
