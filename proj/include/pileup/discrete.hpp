#pragma once

// Discrete pile-up of n + 1 walls with the lock wall pinned at x_0 = 0:
//
//   E_n(x) = (gamma / n^2) sum_{i<j} V(gamma (x_j - x_i)) + (1/n) sum_{i>=1} x_i

#include <Eigen/Core>

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pileup::discrete {

/// Positions 0 = x_0 < x_1 < ... < x_n and the parameter gamma.
class WallConfiguration {
 public:
  /// Throws DomainError if gamma <= 0, n < 1 or x_0 != 0, SingularError for
  /// coincident walls, StructuralError for out-of-order walls.
  WallConfiguration(double gamma, std::vector<double> positions);

  int n() const noexcept { return static_cast<int>(positions_.size()) - 1; }
  double gamma() const noexcept { return gamma_; }
  std::span<const double> positions() const noexcept { return positions_; }
  double operator[](int i) const { return positions_[static_cast<std::size_t>(i)]; }

 private:
  double gamma_;
  std::vector<double> positions_;
};

/// (location, value) pairs, strictly increasing in location.
struct DensitySamples {
  std::vector<double> location;
  std::vector<double> value;

  std::size_t size() const noexcept { return location.size(); }
  /// Samples with location strictly inside (lo, hi).
  DensitySamples restricted(double lo, double hi) const;
};

struct PhysicalParameters {
  double K;
  double h;
  double sigma;
  int n;
};

/// gamma_n = sqrt(n K / (sigma h)).
double gamma_from_physical(const PhysicalParameters& p);

double energy(const WallConfiguration& c);
/// dE_n/dx_i for i = 1..n (x_0 is fixed).
Eigen::VectorXd gradient(const WallConfiguration& c);
/// d^2E_n/dx_i dx_j for i, j = 1..n.
Eigen::MatrixXd hessian(const WallConfiguration& c);

/// Positions generated by the bulk density: y_i = 2 sqrt(a) (1 - sqrt(1 - i/n)).
WallConfiguration bulk_positions(int n, double gamma);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

struct Minimisation {
  WallConfiguration config;
  int iterations;
  double residual;                     ///< max-norm of the final gradient
  std::vector<double> energy_history;  ///< E_n after every accepted step, starting at the initial point
};

/// Damped Newton iteration on grad E_n = 0. Starts from bulk_positions when
/// `init` is empty. Throws ConvergenceError after max_iter iterations and
/// StructuralError when halving cannot keep the walls ordered.
Minimisation newton_minimize(int n, double gamma,
                             const std::optional<WallConfiguration>& init = std::nullopt,
                             const NewtonOptions& options = {});

/// rho_n(x_i) = (2/n) / (x_{i+1} - x_{i-1}), i = 1..n-1.
DensitySamples discrete_density(const WallConfiguration& c);

/// Locations gamma x_i, values rho_n(x_i) - rescaled bulk density at gamma x_i.
DensitySamples rescaled_nu_samples(const WallConfiguration& c);

}  // namespace pileup::discrete
