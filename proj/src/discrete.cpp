#include "pileup/discrete.hpp"

#include "pileup/continuum.hpp"
#include "pileup/errors.hpp"
#include "pileup/potential.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>

namespace pileup::discrete {

namespace {

void require_strictly_increasing(std::span<const double> x) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!std::isfinite(x[i + 1])) throw DomainError("wall position is not finite");
    if (x[i + 1] == x[i]) {
      throw SingularError("walls " + std::to_string(i) + " and " + std::to_string(i + 1) +
                          " coincide; the energy is singular");
    }
    if (x[i + 1] < x[i]) {
      throw StructuralError("wall positions are not increasing at index " + std::to_string(i + 1));
    }
  }
}

bool strictly_increasing(const std::vector<double>& x) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i + 1] > x[i])) return false;
  }
  return true;
}

double energy_of(double gamma, std::span<const double> x) {
  const std::size_t m = x.size();
  const double n = static_cast<double>(m - 1);
  double pair = 0.0;
  double load = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pair += potential::eval(gamma * (x[j] - x[i]), 0);
    if (i > 0) load += x[i];
  }
  return gamma / (n * n) * pair + load / n;
}

Eigen::VectorXd gradient_of(double gamma, std::span<const double> x) {
  const int m = static_cast<int>(x.size());
  const double n = m - 1;
  const double scale = gamma * gamma / (n * n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(m - 1, 1.0 / n);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double d1 = scale * potential::eval(gamma * (x[j] - x[i]), 1);
      // d/dx_j V(gamma (x_j - x_i)) = gamma V'; d/dx_i picks up the opposite sign.
      grad[j - 1] += d1;
      if (i > 0) grad[i - 1] -= d1;
    }
  }
  return grad;
}

Eigen::MatrixXd hessian_of(double gamma, std::span<const double> x) {
  const int m = static_cast<int>(x.size());
  const double n = m - 1;
  const double scale = gamma * gamma * gamma / (n * n);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m - 1, m - 1);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double d2 = scale * potential::eval(gamma * (x[j] - x[i]), 2);
      hess(j - 1, j - 1) += d2;
      if (i > 0) {
        hess(i - 1, i - 1) += d2;
        hess(i - 1, j - 1) -= d2;
        hess(j - 1, i - 1) -= d2;
      }
    }
  }
  return hess;
}

Eigen::VectorXd newton_step(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad) {
  Eigen::LLT<Eigen::MatrixXd> llt(hess);
  if (llt.info() == Eigen::Success) return llt.solve(-grad);
  // Away from the minimiser the Hessian stays symmetric but may lose definiteness.
  return hess.partialPivLu().solve(-grad);
}

}  // namespace

WallConfiguration::WallConfiguration(double gamma, std::vector<double> positions)
    : gamma_(gamma), positions_(std::move(positions)) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw DomainError("gamma must be positive");
  if (positions_.size() < 2) throw DomainError("a configuration needs at least one free wall");
  if (positions_.front() != 0.0) throw DomainError("the lock wall must sit at x_0 = 0");
  require_strictly_increasing(positions_);
}

DensitySamples DensitySamples::restricted(double lo, double hi) const {
  DensitySamples out;
  for (std::size_t i = 0; i < location.size(); ++i) {
    if (location[i] > lo && location[i] < hi) {
      out.location.push_back(location[i]);
      out.value.push_back(value[i]);
    }
  }
  return out;
}

double gamma_from_physical(const PhysicalParameters& p) {
  if (!(p.K > 0.0 && p.h > 0.0 && p.sigma > 0.0) || p.n <= 0) {
    throw DomainError("physical parameters must all be positive");
  }
  return std::sqrt(p.n * p.K / (p.sigma * p.h));
}

double energy(const WallConfiguration& c) { return energy_of(c.gamma(), c.positions()); }

Eigen::VectorXd gradient(const WallConfiguration& c) { return gradient_of(c.gamma(), c.positions()); }

Eigen::MatrixXd hessian(const WallConfiguration& c) { return hessian_of(c.gamma(), c.positions()); }

WallConfiguration bulk_positions(int n, double gamma) {
  if (n < 1) throw DomainError("bulk_positions requires n >= 1");
  const double support = 2.0 * std::sqrt(potential::kA);
  std::vector<double> y(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    y[static_cast<std::size_t>(i)] = support * (1.0 - std::sqrt(1.0 - static_cast<double>(i) / n));
  }
  y.back() = support;
  return WallConfiguration(gamma, std::move(y));
}

Minimisation newton_minimize(int n, double gamma, const std::optional<WallConfiguration>& init,
                             const NewtonOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("Newton tolerance must be positive");
  WallConfiguration start = init ? *init : bulk_positions(n, gamma);
  if (start.n() != n || start.gamma() != gamma) {
    throw DomainError("initial configuration does not match (n, gamma)");
  }

  std::vector<double> x(start.positions().begin(), start.positions().end());
  double e = energy_of(gamma, x);
  std::vector<double> history{e};
  constexpr int kMaxHalvings = 60;
  // Accepted energies may rise by rounding noise only.
  const auto slack = [](double value) { return 64.0 * std::numeric_limits<double>::epsilon() * std::abs(value); };

  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd grad = gradient_of(gamma, x);
    const double residual = grad.lpNorm<Eigen::Infinity>();
    if (residual <= options.tol) {
      return Minimisation{WallConfiguration(gamma, x), iter, residual, std::move(history)};
    }
    if (iter == options.max_iter) break;

    const Eigen::VectorXd step = newton_step(hessian_of(gamma, x), grad);
    double t = 1.0;
    bool ordered_once = false;
    bool accepted = false;
    std::vector<double> trial(x.size());
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      trial[0] = 0.0;
      for (int i = 1; i <= n; ++i) trial[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + t * step[i - 1];
      if (!strictly_increasing(trial)) continue;
      ordered_once = true;
      const double et = energy_of(gamma, trial);
      if (et <= e + slack(e)) {
        x.swap(trial);
        e = et;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!ordered_once) throw StructuralError("line search could not keep the walls ordered");
      throw ConvergenceError("line search stalled: no energy-decreasing step", x, residual);
    }
    history.push_back(e);
  }
  throw ConvergenceError("Newton did not converge in " + std::to_string(options.max_iter) + " iterations", x,
                         gradient_of(gamma, x).lpNorm<Eigen::Infinity>());
}

DensitySamples discrete_density(const WallConfiguration& c) {
  const int n = c.n();
  if (n < 2) throw DomainError("discrete density needs n >= 2");
  DensitySamples out;
  out.location.reserve(static_cast<std::size_t>(n - 1));
  out.value.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) {
    out.location.push_back(c[i]);
    out.value.push_back((2.0 / n) / (c[i + 1] - c[i - 1]));
  }
  return out;
}

DensitySamples rescaled_nu_samples(const WallConfiguration& c) {
  DensitySamples rho = discrete_density(c);
  const double gamma = c.gamma();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double t = gamma * rho.location[i];
    rho.value[i] -= continuum::rho_star(t, gamma);
    rho.location[i] = t;
  }
  return rho;
}

}  // namespace pileup::discrete
