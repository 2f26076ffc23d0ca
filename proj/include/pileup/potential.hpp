#pragma once

// Wall-wall interaction potential
//
//   V(s) = s coth s - log(2 sinh s) = 2|s| / (e^{2|s|} - 1) - log(1 - e^{-2|s|})
//
// together with the closed-form quantities built on it: derivatives, the
// tail integral W(y) = int_y^inf V (via the dilogarithm), the signed
// antiderivative, the moment W2(x) = int_0^inf V(y + x) y dy, the Fourier
// transform, and g(x) = W(x) / sqrt(a).

#include <numbers>

namespace pileup::potential {

/// a = int_0^inf V = pi^2 / 6.
inline constexpr double kA = std::numbers::pi * std::numbers::pi / 6.0;

/// V (order 0), V' (order 1), V'' (order 2). Throws SingularError at s = 0
/// and DomainError for any other order.
double eval(double s, int order = 0);

/// W(y) = int_y^inf V = Li2(e^{-2y}) - y log(1 - e^{-2y}), y >= 0.
double tail_integral(double y);

/// Phi(t) = int_0^t V, odd, Phi(+-inf) = +-a.
double cumulative(double t);

/// int_p^q V for p < q, without the cancellation of Phi(q) - Phi(p) when
/// both ends are far from the singularity on the same side.
double integral(double p, double q);

/// W2(x) = int_0^inf V(y + x) y dy, x >= 0. Memoized, safe for concurrent use.
double second_tail_moment(double x);

/// \hat V(omega) = int_R V(x) e^{-2 pi i x omega} dx.
double fourier(double omega);

/// Li2(z) for z in [0, 1]; absolute error below 1e-12.
double dilog(double z);

/// g(x) = W(x) / sqrt(a).
double g(double x);

/// Constants of the potential. `a` is exact; `first_moment` is obtained once by quadrature.
class PotentialModel {
 public:
  static const PotentialModel& instance();

  double a() const noexcept { return kA; }
  double first_moment() const noexcept { return first_moment_; }

  /// a recomputed by adaptive quadrature of V on (0, inf).
  static double integrate_a();

 private:
  PotentialModel();
  double first_moment_;
};

}  // namespace pileup::potential
