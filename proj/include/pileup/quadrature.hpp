#pragma once

// Thin wrappers over Boost.Math quadrature with the tolerances used across
// the library. Endpoint singularities (log-type) go through tanh-sinh, half
// lines through exp-sinh, smooth finite panels through Gauss-Kronrod.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <limits>

namespace pileup::quad {

inline constexpr double kDefaultTol = 1e-12;

/// Integral over [lo, hi]; tolerates integrable endpoint singularities.
template <class F>
double finite(F f, double lo, double hi, double tol = kDefaultTol) {
  if (!(hi > lo)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  return integrator.integrate(f, lo, hi, tol);
}

/// Integral over [lo, +inf) of an integrand decaying at least exponentially.
template <class F>
double to_infinity(F f, double lo, double tol = kDefaultTol) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  return integrator.integrate([&](double t) { return f(lo + t); }, 0.0,
                              std::numeric_limits<double>::infinity(), tol);
}

/// Adaptive 31-point Gauss-Kronrod on a smooth panel.
template <class F>
double smooth(F f, double lo, double hi, double tol = kDefaultTol, unsigned max_depth = 15) {
  if (!(hi > lo)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, max_depth, tol);
}

}  // namespace pileup::quad
