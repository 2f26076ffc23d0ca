#include "pileup/boundary_layer.hpp"
#include "pileup/errors.hpp"
#include "pileup/potential.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

namespace bl = pileup::boundary_layer;
namespace ct = pileup::continuum;

namespace {

const double kA = std::numbers::pi * std::numbers::pi / 6.0;

double v_ref(double s) {
  s = std::abs(s);
  if (s > 20.0) return s * (1.0 / std::tanh(s) - 1.0) - std::log1p(-std::exp(-2.0 * s));
  return s / std::tanh(s) - std::log(2.0 * std::sinh(s));
}

// int_l^r V(y - t) dt by quadrature, split at the singularity.
double cell_ref(double y, double l, double r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const auto f = [y](double t) { return v_ref(y - t); };
  if (l < y && y < r) return ts.integrate(f, l, y, 1e-14) + ts.integrate(f, y, r, 1e-14);
  return ts.integrate(f, l, r, 1e-14);
}

double g_ref(double x) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate([x](double t) { return v_ref(x + t); }, 0.0, std::numeric_limits<double>::infinity(), 1e-14) /
         std::sqrt(kA);
}

const bl::BoundaryLayerSolution& default_solution() {
  static const bl::BoundaryLayerSolution sol = bl::solve_nu_star(bl::build_grid());
  return sol;
}

}  // namespace

TEST_CASE("geometric grid") {
  const bl::CollocationGrid grid(0.5, 1.2, 10);
  const auto& a = grid.breakpoints();
  REQUIRE(a.size() == 11);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == doctest::Approx(0.6).epsilon(1e-15));
  for (int i = 1; i <= 10; ++i) {
    CHECK(a[i] - a[i - 1] == doctest::Approx(0.5 * std::pow(1.2, i)).epsilon(1e-13));
    CHECK(a[i] == doctest::Approx(0.5 * 1.2 * (std::pow(1.2, i) - 1) / 0.2).epsilon(1e-13));
    CHECK(grid.midpoints()[i - 1] == doctest::Approx(0.5 * (a[i - 1] + a[i])));
  }
  CHECK(std::abs(a.back() - grid.reach_closed_form()) <= 1e-12 * a.back());
  CHECK(grid.cell_containing(0.0) == 0);
  CHECK(grid.cell_containing(a[3]) == 3);
  CHECK(grid.cell_containing(std::nextafter(a[3], 1e9)) == 4);
  CHECK(grid.cell_containing(a.back()) == 10);
  CHECK(grid.cell_containing(a.back() * 1.01) == 0);

  const auto fine = grid.refined();
  CHECK(fine.N() == 20);
  CHECK(fine.b() == doctest::Approx(std::sqrt(1.2)));
  for (int i = 0; i <= 10; ++i) CHECK(fine.breakpoints()[2 * i] == doctest::Approx(a[i]).epsilon(1e-13));

  CHECK_THROWS_AS(bl::CollocationGrid(0.0, 1.2, 10), pileup::ConstructionError);
  CHECK_THROWS_AS(bl::CollocationGrid(0.5, 1.0, 10), pileup::ConstructionError);
  CHECK_THROWS_AS(bl::CollocationGrid(0.5, 1.2, 0), pileup::ConstructionError);
}

TEST_CASE("grid built from the three targets") {
  const auto grid = bl::build_grid();
  CHECK(std::abs(grid.C() - 2.727e-5) <= 5e-9);
  CHECK(std::abs(grid.b() - 1.1) <= 5e-4);
  CHECK(grid.N() == 141);
  CHECK(grid.breakpoints()[1] == doctest::Approx(3e-5).epsilon(1e-14));
  const int j = grid.cell_containing(1.0);
  const double w = grid.breakpoints()[j] - grid.breakpoints()[j - 1];
  CHECK(std::abs(w - 0.1) <= 0.002);
  CHECK(grid.cell_containing(200.0) == grid.N());
  CHECK(std::abs(grid.breakpoints().back() - grid.reach_closed_form()) <= 1e-12 * grid.reach_closed_form());

  CHECK_THROWS_AS(bl::build_grid({-1.0, 0.1, 200.0}), pileup::ConstructionError);
  CHECK_THROWS_AS(bl::build_grid({3e-5, 500.0, 200.0}), pileup::ConstructionError);
  CHECK_THROWS_AS(bl::build_grid({3e-5, 0.1, 0.5}), pileup::ConstructionError);
  CHECK_THROWS_AS(bl::build_grid({0.2, 0.1, 200.0}), pileup::ConstructionError);
}

TEST_CASE("collocation matrix entries") {
  const auto grid = bl::build_grid();
  const auto sys = bl::assemble_system(grid);
  REQUIRE(sys.matrix.rows() == 141);
  const auto& a = grid.breakpoints();
  const auto& y = grid.midpoints();
  for (int j : {0, 40, 85, 140}) {
    for (int i : {0, 1, 39, 40, 41, 85, 140}) {
      CAPTURE(j);
      CAPTURE(i);
      const double ref = cell_ref(y[j], a[i], a[i + 1]);
      CHECK(sys.matrix(j, i) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(sys.matrix(j, i) > 0.0);
    }
    CHECK(sys.rhs[j] == doctest::Approx(g_ref(y[j])).epsilon(1e-11));
  }
}

TEST_CASE("collocation solution") {
  const auto& sol = default_solution();
  double worst = 0.0;
  for (const auto& [y, r] : sol.residual_report) worst = std::max(worst, std::abs(r));
  CHECK(worst <= 1e-10);
  CHECK(sol.condition_estimate < 1e14);
  CHECK(sol.lambda(0) > 0.0);
  CHECK(sol.lower_bound_ok);
  CHECK(*std::min_element(sol.nu_star.values().begin(), sol.nu_star.values().end()) >
        -ct::rho_star(0.0, ct::kUnrescaled));

  // Residual at selected midpoints from an independent quadrature of V * nu_*.
  const auto& a = sol.grid.breakpoints();
  for (int j : {0, 40, 100}) {
    const double yj = sol.grid.midpoints()[j];
    double conv = 0.0;
    for (int i = 0; i < sol.grid.N(); ++i) conv += sol.lambda(i) * cell_ref(yj, a[i], a[i + 1]);
    CHECK(std::abs(conv - g_ref(yj)) <= 1e-8);
  }

  const auto dip = bl::dip_metrics(sol);
  CHECK(dip.min_value < 0.0);
  CHECK(dip.min_value == doctest::Approx(-7.7718036482857776e-4).epsilon(1e-8));
  CHECK(dip.min_location == doctest::Approx(2.0449880536640963).epsilon(1e-12));
  CHECK(dip.sign_changes == 2);
  CHECK(bl::mass(sol) == doctest::Approx(0.35094684058009307).epsilon(1e-9));
}

TEST_CASE("residual off the collocation points (regression values)") {
  const auto& sol = default_solution();
  const auto& a = sol.grid.breakpoints();
  const auto r = bl::el_residual(sol, {a[40], a[86], a[120], 0.5});
  CHECK(r[0] == doctest::Approx(-1.9144103471369078e-06).epsilon(1e-6));
  CHECK(r[1] == doctest::Approx(7.516562326365106e-06).epsilon(1e-6));
  CHECK(std::abs(r[2]) <= 1e-15);
  CHECK(r[3] == doctest::Approx(1.2481259715874105e-4).epsilon(1e-6));
}

TEST_CASE("grid refinement") {
  const auto& sol = default_solution();
  const auto fine = bl::solve_nu_star(sol.grid.refined());
  double peak = 0.0;
  for (double v : sol.nu_star.values()) peak = std::max(peak, std::abs(v));
  double diff = 0.0;
  for (int i = 1; i < sol.grid.N() && sol.grid.breakpoints()[i + 1] <= 10.0; ++i) {
    const double avg = (fine.lambda(2 * i) * fine.nu_star.width(2 * i) +
                        fine.lambda(2 * i + 1) * fine.nu_star.width(2 * i + 1)) / sol.nu_star.width(i);
    diff = std::max(diff, std::abs(avg - sol.lambda(i)));
  }
  CHECK(diff / peak <= 0.02);
  CHECK(std::abs(bl::mass(fine) - bl::mass(sol)) <= 0.05 * std::abs(bl::mass(sol)));
}

TEST_CASE("matched density and affine profile") {
  const auto& sol = default_solution();
  const double x = 0.3;
  CHECK(bl::matched_density(sol, 10.0, x) ==
        doctest::Approx(ct::rho_star(x, ct::kUnrescaled) + sol.nu_star.at(3.0)).epsilon(1e-15));
  CHECK(bl::matched_density(sol, 1e3, 1.0) == ct::rho_star(1.0, ct::kUnrescaled));
  double g2 = 0.0;
  double g3 = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.01 + k * 0.02;
    g2 = std::max(g2, std::abs(bl::matched_density(sol, 1e2, t) - ct::rho_star(t, ct::kUnrescaled)));
    g3 = std::max(g3, std::abs(bl::matched_density(sol, 1e3, t) - ct::rho_star(t, ct::kUnrescaled)));
  }
  CHECK(g3 < g2);
  CHECK_THROWS_AS(bl::matched_density(sol, 0.0, 0.3), pileup::DomainError);

  const auto& y = sol.grid.midpoints();
  CHECK(bl::affine_profile(sol, y[10]) == doctest::Approx(sol.lambda(10)));
  CHECK(bl::affine_profile(sol, 0.5 * (y[10] + y[11])) == doctest::Approx(0.5 * (sol.lambda(10) + sol.lambda(11))));
  CHECK(bl::affine_profile(sol, 1e4) == 0.0);
}

TEST_CASE("a degenerate grid is refused") {
  // Cells near the underflow threshold leave a numerically singular system.
  try {
    bl::solve_nu_star(bl::CollocationGrid(1e-300, 1.5, 60));
    FAIL("expected SolverError");
  } catch (const pileup::SolverError& e) {
    CHECK(!(e.condition_estimate() <= 1e14));
  }
}
