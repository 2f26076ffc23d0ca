#include "pileup/continuum.hpp"

#include "pileup/errors.hpp"
#include "pileup/potential.hpp"
#include "pileup/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pileup::continuum {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMassTol = 1e-10;
constexpr double kLowerBoundTol = 1e-12;
constexpr double kQuadTol = 1e-12;

double support_end(double gamma) { return 2.0 * gamma * std::sqrt(potential::kA); }

// W2 extended to negative arguments: W2(-c) = W2(c) + 2 a c.
double moment_extended(double x) {
  if (x >= 0.0) return potential::second_tail_moment(x);
  return potential::second_tail_moment(-x) - 2.0 * potential::kA * x;
}

// h_gamma on all of [0, inf); the public entry point keeps the documented domain.
double h_gamma_extended(double x, double gamma) {
  return (moment_extended(support_end(gamma) - x) - potential::second_tail_moment(x)) /
         (2.0 * potential::kA * gamma);
}

std::string describe(const Admissibility& adm) {
  std::ostringstream os;
  os << "density is not admissible:";
  for (const auto& v : adm.violations) os << " [" << v << "]";
  return os.str();
}

double sinc(double z) {
  if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

}  // namespace

PiecewiseConstantDensity::PiecewiseConstantDensity(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() != values_.size() + 1) {
    throw DomainError("a step density with N cells needs N + 1 breakpoints");
  }
  if (!(breakpoints_.front() >= 0.0)) throw DomainError("step densities live on [0, inf)");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i + 1] > breakpoints_[i]) || !std::isfinite(breakpoints_[i + 1])) {
      throw DomainError("breakpoints must be finite and strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("cell values must be finite");
  }
}

double PiecewiseConstantDensity::at(double x) const {
  if (values_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double PiecewiseConstantDensity::mass() const {
  double m = 0.0;
  for (int i = 0; i < cells(); ++i) m += value(i) * width(i);
  return m;
}

double PiecewiseConstantDensity::total_variation() const {
  double tv = 0.0;
  for (int i = 0; i < cells(); ++i) tv += std::abs(value(i)) * width(i);
  return tv;
}

bool Admissibility::violates(const std::string& clause) const {
  return std::find(violations.begin(), violations.end(), clause) != violations.end();
}

double rho_star(double x, double gamma) {
  if (!(x >= 0.0)) throw DomainError("rho_star requires x >= 0");
  const double a = potential::kA;
  const double stretch = std::isinf(gamma) ? 1.0 : gamma;
  return std::max(0.0, 1.0 / std::sqrt(a) - x / (2.0 * a * stretch));
}

double zero_order_energy(const PiecewiseConstantDensity& rho) {
  for (double v : rho.values()) {
    if (v < 0.0) throw AdmissibilityError("zero-order energy needs a non-negative density");
  }
  if (std::abs(rho.mass() - 1.0) > 1e-8) {
    throw AdmissibilityError("zero-order energy needs a probability density (mass 1)");
  }
  double square = 0.0;
  double moment = 0.0;
  for (int i = 0; i < rho.cells(); ++i) {
    const double l = rho.left(i);
    const double r = rho.right(i);
    square += rho.value(i) * rho.value(i) * (r - l);
    moment += rho.value(i) * (r * r - l * l) / 2.0;
  }
  return potential::kA * square + moment;
}

double h_gamma(double x, double gamma) {
  if (!(gamma > 0.0) || std::isinf(gamma)) throw DomainError("h_gamma needs a finite positive gamma");
  if (!(x >= 0.0 && x <= support_end(gamma))) {
    throw DomainError("h_gamma is defined on [0, 2 gamma sqrt(a)]");
  }
  return h_gamma_extended(x, gamma);
}

double h_gamma_bound(double gamma) {
  return potential::PotentialModel::instance().first_moment() / (2.0 * potential::kA * gamma);
}

double convolve_V(const PiecewiseConstantDensity& nu, double x) {
  double sum = 0.0;
  for (int i = 0; i < nu.cells(); ++i) {
    sum += nu.value(i) * potential::integral(x - nu.right(i), x - nu.left(i));
  }
  return sum;
}

double interaction(const PiecewiseConstantDensity& nu) {
  const int n = nu.cells();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (nu.value(i) == 0.0) continue;
    for (int k = i; k < n; ++k) {
      if (nu.value(k) == 0.0) continue;
      const double lo = nu.left(k);
      const double hi = nu.right(k);
      // Inner integral over cell k in closed form; kinks of the outer
      // integrand only sit at breakpoints, i.e. at the ends of cell i.
      const double pair = quad::finite(
          [&](double x) { return potential::integral(x - hi, x - lo); },
          nu.left(i), nu.right(i), kQuadTol);
      total += (k == i ? 1.0 : 2.0) * nu.value(i) * nu.value(k) * pair;
    }
  }
  return total;
}

double linear_term(const PiecewiseConstantDensity& nu) {
  double total = 0.0;
  for (int i = 0; i < nu.cells(); ++i) {
    if (nu.value(i) == 0.0) continue;
    total += nu.value(i) * quad::finite([](double x) { return potential::g(x); }, nu.left(i), nu.right(i), kQuadTol);
  }
  return total;
}

double h_gamma_term(const PiecewiseConstantDensity& nu, double gamma) {
  const double end = support_end(gamma);
  const auto h = [gamma](double x) { return h_gamma_extended(x, gamma); };
  double total = 0.0;
  for (int i = 0; i < nu.cells(); ++i) {
    if (nu.value(i) == 0.0) continue;
    const double l = nu.left(i);
    const double r = nu.right(i);
    double cell;
    if (l < end && end < r) {
      cell = quad::finite(h, l, end, kQuadTol) + quad::finite(h, end, r, kQuadTol);
    } else {
      cell = quad::finite(h, l, r, kQuadTol);
    }
    total += nu.value(i) * cell;
  }
  return total;
}

double first_order_energy(const PiecewiseConstantDensity& nu) {
  const Admissibility adm = check_admissible(nu, kUnrescaled);
  if (!adm.ok) throw AdmissibilityError(describe(adm));
  return 0.5 * interaction(nu) - linear_term(nu);
}

double first_order_energy_gamma(const PiecewiseConstantDensity& nu, double gamma) {
  if (!(gamma > 0.0) || std::isinf(gamma)) throw DomainError("F_gamma needs a finite positive gamma");
  const Admissibility adm = check_admissible(nu, gamma);
  if (!adm.ok) throw AdmissibilityError(describe(adm));
  return 0.5 * interaction(nu) - linear_term(nu) + h_gamma_term(nu, gamma);
}

double spectral_quadratic_form(const PiecewiseConstantDensity& nu) {
  const int n = nu.cells();
  if (n == 0) return 0.0;

  // Jumps of nu at the breakpoints.
  std::vector<double> jump(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    jump[static_cast<std::size_t>(i)] += nu.value(i);
    jump[static_cast<std::size_t>(i) + 1] -= nu.value(i);
  }
  double jump_l1 = 0.0;
  double jump_l2 = 0.0;
  for (double c : jump) {
    jump_l1 += std::abs(c);
    jump_l2 += c * c;
  }
  if (jump_l1 == 0.0) return 0.0;
  const auto& a = nu.breakpoints();
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < a.size(); ++k) min_gap = std::min(min_gap, a[k + 1] - a[k]);
  const double extent = a.back() - a.front();

  // |nu^(omega)|^2 = |sum_k c_k e^{-2 pi i omega a_k}|^2 / (2 pi omega)^2, and beyond
  // omega ~ 1 the form factor is 1/(2 omega) up to e^{-2 pi^2 omega}. The
  // non-oscillating part of the tail is added in closed form; the cutoff bounds
  // the oscillating remainder, sum |c_k c_l| / (4 pi^3 d_min Omega^3), by 1e-12.
  const double cutoff = std::max(
      64.0, std::cbrt(jump_l1 * jump_l1 / (4.0 * kPi * kPi * kPi * min_gap * 1e-12)));

  const auto integrand = [&](double omega) {
    double re = 0.0;
    double im = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = nu.width(i);
      const double mid = nu.left(i) + 0.5 * w;
      const double amp = nu.value(i) * w * sinc(kPi * omega * w);
      const double phase = 2.0 * kPi * omega * mid;
      re += amp * std::cos(phase);
      im -= amp * std::sin(phase);
    }
    return potential::fourier(omega) * (re * re + im * im);
  };

  using Gauss = boost::math::quadrature::gauss<double, 30>;
  const double panel = std::min(1.0, 2.0 / extent);
  const auto panels = static_cast<long>(std::ceil(cutoff / panel));
  double half = 0.0;
  for (long p = 0; p < panels; ++p) {
    half += Gauss::integrate(integrand, p * panel, (p + 1) * panel);
  }
  const double omega_max = panels * panel;
  return 2.0 * half + jump_l2 / (8.0 * kPi * kPi * omega_max * omega_max);
}

Admissibility check_admissible(const PiecewiseConstantDensity& nu, double gamma) {
  Admissibility out;
  const auto fail = [&](const std::string& clause) {
    out.ok = false;
    if (!out.violates(clause)) out.violations.push_back(clause);
  };
  if (!(gamma > 0.0)) {
    fail("gamma");
    return out;
  }
  const double floor0 = 1.0 / std::sqrt(potential::kA);

  if (std::isinf(gamma)) {
    for (int i = 0; i < nu.cells(); ++i) {
      if (nu.value(i) < -floor0 - kLowerBoundTol) fail("lower bound");
    }
    // sup_x nu^+([x, x + 1]) over windows starting at breakpoints.
    double worst = 0.0;
    for (int s = 0; s < nu.cells(); ++s) {
      const double x0 = nu.left(s);
      double window = 0.0;
      for (int i = s; i < nu.cells() && nu.left(i) < x0 + 1.0; ++i) {
        window += std::max(0.0, nu.value(i)) * (std::min(nu.right(i), x0 + 1.0) - nu.left(i));
      }
      worst = std::max(worst, window);
    }
    if (!std::isfinite(worst)) fail("local mass");
    return out;
  }

  if (nu.total_variation() > 2.0 * gamma) fail("total variation");
  if (std::abs(nu.mass()) > kMassTol) fail("zero mass");
  const double end = support_end(gamma);
  for (int i = 0; i < nu.cells(); ++i) {
    const double v = nu.value(i);
    if (v >= 0.0) continue;
    // rho~_* decreases, so its infimum over the cell sits at the right end.
    if (v < -rho_star(nu.right(i), gamma) - kLowerBoundTol) fail("lower bound");
    if (nu.right(i) > end) fail("negative support");
  }
  return out;
}

}  // namespace pileup::continuum
