#pragma once

// Continuum objects: the bulk minimiser rho_*, the zero-order energy E, the
// auxiliary function h_gamma, the first-order functionals F and F_gamma on
// step densities, and the Fourier-side form int \hat V |\hat nu|^2.

#include <limits>
#include <string>
#include <vector>

namespace pileup::continuum {

/// Selects the unrescaled objects (rho_* instead of the gamma-rescaled one).
inline constexpr double kUnrescaled = std::numeric_limits<double>::infinity();

/// sum_i lambda_i chi_{(a_{i-1}, a_i)} with 0 <= a_0 < ... < a_N.
class PiecewiseConstantDensity {
 public:
  PiecewiseConstantDensity() = default;
  /// Throws DomainError unless breakpoints.size() == values.size() + 1,
  /// breakpoints are strictly increasing from a_0 >= 0 and everything is finite.
  PiecewiseConstantDensity(std::vector<double> breakpoints, std::vector<double> values);

  /// Cells of equal width covering [lo, hi], with values f(midpoint).
  template <class F>
  static PiecewiseConstantDensity sampled(F f, double lo, double hi, int cells) {
    std::vector<double> a(static_cast<std::size_t>(cells) + 1);
    std::vector<double> v(static_cast<std::size_t>(cells));
    for (int i = 0; i <= cells; ++i) a[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / cells;
    for (int i = 0; i < cells; ++i) {
      v[static_cast<std::size_t>(i)] = f(0.5 * (a[static_cast<std::size_t>(i)] + a[static_cast<std::size_t>(i) + 1]));
    }
    return PiecewiseConstantDensity(std::move(a), std::move(v));
  }

  int cells() const noexcept { return static_cast<int>(values_.size()); }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double left(int i) const { return breakpoints_[static_cast<std::size_t>(i)]; }
  double right(int i) const { return breakpoints_[static_cast<std::size_t>(i) + 1]; }
  double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  double width(int i) const { return right(i) - left(i); }

  /// Cell value at x (left-closed cells); 0 outside [a_0, a_N).
  double at(double x) const;
  double mass() const;
  double total_variation() const;
  bool empty() const noexcept { return values_.empty(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// (1/sqrt(a) - x / (2 a gamma))^+; gamma = kUnrescaled gives rho_*(x).
double rho_star(double x, double gamma);

/// E(rho) = a int rho^2 + int x rho. Throws AdmissibilityError unless rho >= 0 with unit mass.
double zero_order_energy(const PiecewiseConstantDensity& rho);

/// h_gamma(x) = [W2(2 gamma sqrt(a) - x) - W2(x)] / (2 a gamma) on [0, 2 gamma sqrt(a)].
double h_gamma(double x, double gamma);

/// Upper bound first_moment / (2 a gamma) on |h_gamma|.
double h_gamma_bound(double gamma);

/// (V * nu)(x) = sum_i lambda_i [Phi(x - a_{i-1}) - Phi(x - a_i)].
double convolve_V(const PiecewiseConstantDensity& nu, double x);

/// int (V * nu) nu, assembled from exact inner and adaptive outer cell integrals.
double interaction(const PiecewiseConstantDensity& nu);

/// int g nu.
double linear_term(const PiecewiseConstantDensity& nu);

/// int h_gamma nu.
double h_gamma_term(const PiecewiseConstantDensity& nu, double gamma);

/// F(nu) = (1/2) int (V * nu) nu - int g nu. Requires nu admissible for gamma = inf.
double first_order_energy(const PiecewiseConstantDensity& nu);

/// F_gamma(nu) = F(nu) + int h_gamma nu. Requires nu admissible for the given gamma.
double first_order_energy_gamma(const PiecewiseConstantDensity& nu, double gamma);

/// int_R \hat V(omega) |\hat nu(omega)|^2 d omega.
double spectral_quadratic_form(const PiecewiseConstantDensity& nu);

struct Admissibility {
  bool ok = true;
  std::vector<std::string> violations;  ///< clause names: "zero mass", "lower bound", ...

  bool violates(const std::string& clause) const;
};

/// Membership of nu in the admissible class for finite gamma, or the limit
/// class when gamma = kUnrescaled. Never throws.
Admissibility check_admissible(const PiecewiseConstantDensity& nu, double gamma);

}  // namespace pileup::continuum
