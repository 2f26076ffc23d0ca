#include "pileup/potential.hpp"

#include "pileup/errors.hpp"
#include "pileup/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace pileup::potential {

namespace {

constexpr double kPi = std::numbers::pi;

// Li2 by its power series; only called with z <= 1/2 so the terms decay at
// least like 2^{-k} / k^2.
double dilog_series(double z) {
  if (z == 0.0) return 0.0;
  double sum = 0.0;
  double power = 1.0;
  for (int k = 1; k < 200; ++k) {
    power *= z;
    const double term = power / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-16) break;
  }
  return sum;
}

// Li2(z) given both z and 1 - z, so callers holding an accurate complement
// (e.g. -expm1(-2y)) do not lose it to rounding.
double dilog_pair(double z, double one_minus_z) {
  if (z <= 0.5) return dilog_series(z);
  if (one_minus_z == 0.0) return kA;
  return kA - std::log(z) * std::log(one_minus_z) - dilog_series(one_minus_z);
}

class MomentCache {
 public:
  double get(double x) {
    const long long key = std::llround(x * 1e12);
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) return it->second;
    }
    const double value = compute(x);
    std::unique_lock lock(mutex_);
    return table_.try_emplace(key, value).first->second;
  }

 private:
  // W2(x) = int_x^inf (t - x) V(t) dt = int_x^inf W(t) dt (integration by parts).
  static double compute(double x) {
    if (x > 400.0) return 0.0;  // W(t) < 1e-340 beyond this point
    return quad::to_infinity([](double t) { return tail_integral(t); }, x, 1e-12);
  }

  std::shared_mutex mutex_;
  std::map<long long, double> table_;
};

MomentCache& moment_cache() {
  static MomentCache cache;
  return cache;
}

}  // namespace

double eval(double s, int order) {
  if (order < 0 || order > 2) {
    throw DomainError("potential order must be 0, 1 or 2, got " + std::to_string(order));
  }
  if (s == 0.0) throw SingularError("potential is singular at zero");
  const double r = std::abs(s);
  switch (order) {
    case 0:
      if (r <= 1.0) return r / std::tanh(r) - std::log(2.0 * std::sinh(r));
      return 2.0 * r / std::expm1(2.0 * r) - std::log1p(-std::exp(-2.0 * r));
    case 1: {
      double mag;
      if (r <= 1.0) {
        const double sh = std::sinh(r);
        mag = r / (sh * sh);
      } else {
        const double q = std::exp(-2.0 * r);
        const double d = 1.0 - q;
        mag = 4.0 * r * q / (d * d);
      }
      return s > 0.0 ? -mag : mag;
    }
    default: {
      if (r <= 1.0) {
        const double sh = std::sinh(r);
        return (2.0 * r * std::cosh(r) - sh) / (sh * sh * sh);
      }
      const double q = std::exp(-2.0 * r);
      const double d = 1.0 - q;
      return 8.0 * q * (r * (1.0 + q) - 0.5 * d) / (d * d * d);
    }
  }
}

double dilog(double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("dilog argument outside [0, 1]");
  return dilog_pair(z, 1.0 - z);
}

double tail_integral(double y) {
  if (!(y >= 0.0)) throw DomainError("tail_integral requires y >= 0");
  if (y == 0.0) return kA;
  const double q = std::exp(-2.0 * y);
  const double one_minus_q = -std::expm1(-2.0 * y);
  const double log_one_minus_q = std::log(one_minus_q);
  if (q <= 0.5) return dilog_series(q) - y * log_one_minus_q;
  // Reflection with log q = -2y:  Li2(q) = a + 2y log(1 - q) - Li2(1 - q).
  return kA + y * log_one_minus_q - dilog_series(one_minus_q);
}

double cumulative(double t) {
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return t > 0.0 ? kA : -kA;
  const double magnitude = kA - tail_integral(std::abs(t));
  return t > 0.0 ? magnitude : -magnitude;
}

double integral(double p, double q) {
  if (q < p) return -integral(q, p);
  if (p >= 0.0) return tail_integral(p) - tail_integral(q);
  if (q <= 0.0) return tail_integral(-q) - tail_integral(-p);
  return 2.0 * kA - tail_integral(q) - tail_integral(-p);
}

double second_tail_moment(double x) {
  if (!(x >= 0.0)) throw DomainError("second_tail_moment requires x >= 0");
  return moment_cache().get(x);
}

double fourier(double omega) {
  const double w = std::abs(omega);
  if (w < 1e-4) {
    const double u2 = std::pow(kPi * kPi * w, 2);
    return 0.5 * kPi * kPi *
           (2.0 / 3.0 + u2 * (-4.0 / 45.0 + u2 * (4.0 / 315.0 - u2 * 8.0 / 4725.0)));
  }
  const double u = kPi * kPi * w;
  double u_csch2;
  if (u > 1.0) {
    const double q = std::exp(-2.0 * u);
    const double d = 1.0 - q;
    u_csch2 = 4.0 * u * q / (d * d);
  } else {
    const double sh = std::sinh(u);
    u_csch2 = u / (sh * sh);
  }
  return (1.0 / std::tanh(u) - u_csch2) / (2.0 * w);
}

double g(double x) {
  if (!(x >= 0.0)) throw DomainError("g requires x >= 0");
  return tail_integral(x) / std::sqrt(kA);
}

PotentialModel::PotentialModel() : first_moment_(second_tail_moment(0.0)) {}

const PotentialModel& PotentialModel::instance() {
  static const PotentialModel model;
  return model;
}

double PotentialModel::integrate_a() {
  const auto v = [](double s) { return eval(s, 0); };
  return quad::finite(v, 0.0, 1.0) + quad::to_infinity(v, 1.0);
}

}  // namespace pileup::potential
