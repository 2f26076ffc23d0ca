#include "pileup/continuum.hpp"
#include "pileup/discrete.hpp"
#include "pileup/errors.hpp"
#include "pileup/potential.hpp"

#include <Eigen/Cholesky>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace d = pileup::discrete;

namespace {

const double kSqrtA = std::numbers::pi / std::sqrt(6.0);

double v_ref(double s) {
  s = std::abs(s);
  return s / std::tanh(s) - std::log(2.0 * std::sinh(s));
}

double dv_ref(double s) { return -s / (std::sinh(s) * std::sinh(s)); }

double energy_ref(double gamma, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size()) - 1;
  double pair = 0.0;
  double lin = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) pair += v_ref(gamma * (x[j] - x[i]));
    lin += x[i];
  }
  return gamma / (double(n) * n) * pair + lin / n;
}

std::vector<double> random_positions(std::mt19937_64& rng, int n, double gamma) {
  std::uniform_real_distribution<double> gap(0.1, 1.5);
  std::vector<double> x{0.0};
  for (int i = 0; i < n; ++i) x.push_back(x.back() + gap(rng) / gamma);
  return x;
}

}  // namespace

TEST_CASE("configuration validation") {
  CHECK_NOTHROW(d::WallConfiguration(1.0, {0.0, 0.5}));
  CHECK_THROWS_AS(d::WallConfiguration(0.0, {0.0, 0.5}), pileup::DomainError);
  CHECK_THROWS_AS(d::WallConfiguration(-1.0, {0.0, 0.5}), pileup::DomainError);
  CHECK_THROWS_AS(d::WallConfiguration(1.0, {0.0}), pileup::DomainError);
  CHECK_THROWS_AS(d::WallConfiguration(1.0, {0.1, 0.5}), pileup::DomainError);
  CHECK_THROWS_AS(d::WallConfiguration(1.0, {0.0, 0.5, 0.5}), pileup::SingularError);
  CHECK_THROWS_AS(d::WallConfiguration(1.0, {0.0, 0.5, 0.4}), pileup::StructuralError);
  const d::WallConfiguration c(2.0, {0.0, 0.25, 0.75});
  CHECK(c.n() == 2);
  CHECK(c.gamma() == 2.0);
  CHECK(c[2] == 0.75);
  CHECK(c.positions().size() == 3);
}

TEST_CASE("energy matches a direct double sum") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial;
    const double gamma = 0.5 + 0.4 * trial;
    const auto x = random_positions(rng, n, gamma);
    CHECK(d::energy(d::WallConfiguration(gamma, x)) == doctest::Approx(energy_ref(gamma, x)).epsilon(1e-12));
  }
}

TEST_CASE("gradient and Hessian against finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(1, 16);
  std::uniform_real_distribution<double> gam(0.5, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = size(rng);
    const double gamma = gam(rng);
    const auto x = random_positions(rng, n, gamma);
    const d::WallConfiguration c(gamma, x);
    const auto g = d::gradient(c);
    const auto H = d::hessian(c);
    REQUIRE(g.size() == n);
    REQUIRE(H.rows() == n);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const double h = 1e-6;
    for (int i = 1; i <= n; ++i) {
      auto xp = x;
      auto xm = x;
      xp[i] += h;
      xm[i] -= h;
      CHECK(std::abs(g[i - 1] - (energy_ref(gamma, xp) - energy_ref(gamma, xm)) / (2 * h)) <= 1e-6);
      const Eigen::VectorXd fd =
          (d::gradient(d::WallConfiguration(gamma, xp)) - d::gradient(d::WallConfiguration(gamma, xm))) / (2 * h);
      CHECK((H.col(i - 1) - fd).cwiseAbs().maxCoeff() <= 1e-4);
    }
  }
}

TEST_CASE("single free wall: minimiser solves gamma^2 V'(gamma x) = -1") {
  for (double gamma : {1.0, 2.0, 5.0}) {
    // Bisection on the stationarity condition, V' from the textbook formula.
    double lo = 1e-6;
    double hi = 50.0;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (gamma * gamma * dv_ref(gamma * mid) + 1.0 < 0.0 ? lo : hi) = mid;
    }
    const auto m = d::newton_minimize(1, gamma);
    CAPTURE(gamma);
    CHECK(m.config[1] == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
    CHECK(m.residual <= 1e-10);
  }
  // gamma = 1: x / sinh^2 x = 1 at x = 0.808068756887...
  CHECK(d::newton_minimize(1, 1.0).config[1] == doctest::Approx(0.80806875688715692).epsilon(1e-12));
}

TEST_CASE("newton: ordered, stationary, monotone in energy, independent of start") {
  const int n = 32;
  const double gamma = std::sqrt(32.0);
  const auto a = d::newton_minimize(n, gamma);
  CHECK(a.config[1] > 0.0);
  for (int i = 0; i < n; ++i) CHECK(a.config[i] < a.config[i + 1]);
  CHECK(d::gradient(a.config).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(a.residual <= 1e-10);
  CHECK(a.energy_history.size() == static_cast<std::size_t>(a.iterations) + 1);
  for (std::size_t k = 1; k < a.energy_history.size(); ++k) {
    CHECK(a.energy_history[k] <= a.energy_history[k - 1] + 1e-14 * std::abs(a.energy_history[k - 1]));
  }
  CHECK(a.energy_history.back() == doctest::Approx(d::energy(a.config)).epsilon(1e-15));

  std::vector<double> uniform(n + 1);
  for (int i = 0; i <= n; ++i) uniform[i] = 2.0 * kSqrtA * i / n;
  const auto b = d::newton_minimize(n, gamma, d::WallConfiguration(gamma, uniform));
  for (int i = 0; i <= n; ++i) CHECK(std::abs(a.config[i] - b.config[i]) <= 1e-8);

  // The Hessian at the minimiser is positive definite.
  const Eigen::LLT<Eigen::MatrixXd> llt(d::hessian(a.config));
  CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("newton reports non-convergence with the last iterate") {
  d::NewtonOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-14;
  try {
    d::newton_minimize(64, 8.0, std::nullopt, opts);
    FAIL("expected ConvergenceError");
  } catch (const pileup::ConvergenceError& e) {
    CHECK(e.last_iterate().size() == 65);
    CHECK(e.residual() > 1e-14);
  }
  CHECK_THROWS_AS(d::newton_minimize(0, 1.0), pileup::DomainError);
  CHECK_THROWS_AS(d::newton_minimize(4, 1.0, d::WallConfiguration(2.0, {0.0, 1.0, 2.0, 3.0, 4.0})), pileup::DomainError);
}

TEST_CASE("bulk positions follow the inverse cumulative bulk density") {
  const auto b = d::bulk_positions(10, 3.0);
  CHECK(b.n() == 10);
  CHECK(b[0] == 0.0);
  CHECK(b[10] == doctest::Approx(2.0 * kSqrtA));
  // int_0^{y_i} rho_* = i / n
  for (int i = 1; i < 10; ++i) {
    const double y = b[i];
    const double mass = y / kSqrtA - y * y / (4.0 * kSqrtA * kSqrtA);
    CHECK(mass == doctest::Approx(i / 10.0).epsilon(1e-13));
  }
}

TEST_CASE("discrete density") {
  const d::WallConfiguration c(1.0, {0.0, 0.1, 0.3, 0.6, 1.0});
  const auto rho = d::discrete_density(c);
  REQUIRE(rho.size() == 3);
  CHECK(rho.location[0] == 0.1);
  CHECK(rho.value[0] == doctest::Approx(0.5 / 0.3));
  CHECK(rho.value[2] == doctest::Approx(0.5 / 0.7));
  CHECK_THROWS_AS(d::discrete_density(d::WallConfiguration(1.0, {0.0, 1.0})), pileup::DomainError);

  const auto r = rho.restricted(0.1, 0.6);
  CHECK(r.size() == 1);
  CHECK(r.location[0] == 0.3);

  const auto nu = d::rescaled_nu_samples(d::WallConfiguration(2.0, {0.0, 0.1, 0.3, 0.6, 1.0}));
  CHECK(nu.location[1] == doctest::Approx(0.6));
  CHECK(nu.value[1] == doctest::Approx(0.5 / 0.5 - (1.0 / kSqrtA - 0.3 / (2 * kSqrtA * kSqrtA))));
}

TEST_CASE("bulk agreement over the middle third, n = 128, gamma = sqrt(n)") {
  const auto m = d::newton_minimize(128, std::sqrt(128.0));
  const auto rho = d::discrete_density(m.config);
  const double L = 2.0 * kSqrtA;
  double worst = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double x = rho.location[k];
    CHECK(rho.value[k] > 0.0);
    if (x >= L / 3 && x <= 2 * L / 3) worst = std::max(worst, std::abs(rho.value[k] - (1 / kSqrtA - x / (2 * kSqrtA * kSqrtA))));
  }
  CHECK(worst <= 0.1 * (1 / kSqrtA - kSqrtA / (2 * kSqrtA * kSqrtA)));
}

TEST_CASE("gamma from physical parameters") {
  CHECK(d::gamma_from_physical({2.0, 0.5, 0.25, 64}) == doctest::Approx(32.0));
  CHECK_THROWS_AS(d::gamma_from_physical({0.0, 0.5, 0.25, 64}), pileup::DomainError);
  CHECK_THROWS_AS(d::gamma_from_physical({1.0, 0.5, 0.25, 0}), pileup::DomainError);
}
