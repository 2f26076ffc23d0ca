#include "pileup/verify.hpp"

#include "pileup/boundary_layer.hpp"
#include "pileup/cli.hpp"
#include "pileup/continuum.hpp"
#include "pileup/csv.hpp"
#include "pileup/discrete.hpp"
#include "pileup/errors.hpp"
#include "pileup/potential.hpp"
#include "pileup/quadrature.hpp"
#include "pileup/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace pileup::verify {

namespace {

namespace pot = potential;
namespace ct = continuum;
namespace bl = boundary_layer;

std::string fmt(double v) { return csv::format_number(v); }

class Suite {
 public:
  void add(const std::string& module, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      auto [ok, detail] = body();
      checks_.push_back({module, name, ok, std::move(detail)});
    } catch (const std::exception& e) {
      checks_.push_back({module, name, false, std::string("exception: ") + e.what()});
    }
  }
  std::vector<Check> take() { return std::move(checks_); }

 private:
  std::vector<Check> checks_;
};

std::pair<bool, std::string> bound(double value, double limit, const std::string& label) {
  return {value <= limit, label + "=" + fmt(value) + " limit=" + fmt(limit)};
}

// 2 int_0^inf V(x) cos(2 pi omega x) dx, split into half periods.
double cosine_transform(double omega) {
  const auto f = [omega](double x) { return pot::eval(x) * std::cos(2.0 * std::numbers::pi * omega * x); };
  const double step = std::min(0.5, 0.5 / omega);
  double sum = quad::finite(f, 0.0, step);
  for (double x = step; x < 40.0; x += step) sum += quad::smooth(f, x, x + step, 1e-14, 12);
  return 2.0 * sum;
}

ct::PiecewiseConstantDensity random_step(std::mt19937_64& rng, int cells, double lo, double hi, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> breaks{lo};
  std::uniform_real_distribution<double> w(0.2, 1.0);
  double total = 0.0;
  std::vector<double> widths;
  for (int i = 0; i < cells; ++i) total += widths.emplace_back(w(rng));
  for (double x : widths) breaks.push_back(breaks.back() + (hi - lo) * x / total);
  breaks.back() = hi;
  std::vector<double> values;
  for (int i = 0; i < cells; ++i) values.push_back(u(rng));
  return ct::PiecewiseConstantDensity(std::move(breaks), std::move(values));
}

void potential_checks(Suite& s) {
  s.add("potential", "a by quadrature", [] { return bound(std::abs(pot::PotentialModel::integrate_a() - pot::kA), 1e-10, "err"); });
  s.add("potential", "first moment finite and positive", [] {
    const double m = pot::PotentialModel::instance().first_moment();
    return std::pair{std::isfinite(m) && m > 0.0, "first_moment=" + fmt(m)};
  });
  s.add("potential", "dilog endpoints", [] {
    const double e = std::max(std::abs(pot::dilog(0.0)), std::abs(pot::dilog(1.0) - pot::kA));
    return bound(e, 1e-12, "err");
  });
  s.add("potential", "dilog reflection", [] {
    double worst = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double z = k / 100.0;
      const double lhs = pot::dilog(z) + pot::dilog(1.0 - z);
      worst = std::max(worst, std::abs(lhs - (pot::kA - std::log(z) * std::log1p(-z))));
    }
    return bound(worst, 1e-10, "max_err");
  });
  s.add("potential", "evenness", [] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      double x = u(rng);
      if (x == 0.0) x = 0.5;
      worst = std::max(worst, std::abs(pot::eval(x) - pot::eval(-x)));
    }
    return bound(worst, 0.0, "max_diff");
  });
  s.add("potential", "decreasing on (0, inf)", [] {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(1e-3, 15.0);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      double s1 = u(rng);
      double s2 = u(rng);
      if (s1 == s2) continue;
      if (s1 > s2) std::swap(s1, s2);
      if (!(pot::eval(s1) > pot::eval(s2))) ++bad;
    }
    return std::pair{bad == 0, "violations=" + std::to_string(bad)};
  });
  s.add("potential", "derivative consistency", [] {
    const double h = 1e-6;
    double worst = 0.0;
    for (int k = 0; k <= 99; ++k) {
      const double x = 0.1 + (10.0 - 0.1) * k / 99.0;
      worst = std::max(worst, std::abs(pot::eval(x, 1) - (pot::eval(x + h) - pot::eval(x - h)) / (2.0 * h)));
    }
    return bound(worst, 1e-5, "max_err");
  });
  s.add("potential", "tail integral against quadrature", [] {
    double worst = 0.0;
    for (double y : {0.01, 0.5, 3.0}) {
      const double q = quad::to_infinity([](double t) { return pot::eval(t); }, y);
      worst = std::max(worst, std::abs(pot::tail_integral(y) - q));
    }
    return bound(worst, 1e-9, "max_err");
  });
  s.add("potential", "fourier positivity", [] {
    double lowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 120; ++k) lowest = std::min(lowest, pot::fourier(std::pow(10.0, -3.0 + 6.0 * k / 120.0)));
    return std::pair{lowest > 0.0, "min=" + fmt(lowest)};
  });
  s.add("potential", "fourier against cosine transform", [] {
    double worst = 0.0;
    for (double w : {0.1, 1.0, 10.0}) worst = std::max(worst, std::abs(pot::fourier(w) - cosine_transform(w)));
    return bound(worst, 1e-6, "max_err");
  });
  s.add("potential", "small-s asymptote", [] {
    double worst = 0.0;
    for (double x : {1e-4, 1e-6}) worst = std::max(worst, std::abs(pot::eval(x) + std::log(x) - (1.0 - std::log(2.0))));
    return bound(worst, 1e-3, "max_err");
  });
}

void discrete_checks(Suite& s) {
  s.add("discrete", "gradient and hessian against finite differences", [] {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> size(1, 16);
    std::uniform_real_distribution<double> gap(0.1, 1.0);
    std::uniform_real_distribution<double> gam(0.5, 4.0);
    double g_err = 0.0;
    double h_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = size(rng);
      const double gamma = gam(rng);
      std::vector<double> x{0.0};
      for (int i = 0; i < n; ++i) x.push_back(x.back() + gap(rng) / gamma);
      const discrete::WallConfiguration c(gamma, x);
      const auto grad = discrete::gradient(c);
      const auto hess = discrete::hessian(c);
      const double h = 1e-6;
      for (int i = 1; i <= n; ++i) {
        auto xp = x;
        auto xm = x;
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        const discrete::WallConfiguration cp(gamma, xp);
        const discrete::WallConfiguration cm(gamma, xm);
        g_err = std::max(g_err, std::abs(grad[i - 1] - (discrete::energy(cp) - discrete::energy(cm)) / (2.0 * h)));
        const Eigen::VectorXd fd = (discrete::gradient(cp) - discrete::gradient(cm)) / (2.0 * h);
        h_err = std::max(h_err, (hess.col(i - 1) - fd).cwiseAbs().maxCoeff());
      }
    }
    return std::pair{g_err <= 1e-6 && h_err <= 1e-4, "grad_err=" + fmt(g_err) + " hess_err=" + fmt(h_err)};
  });

  const int n = 32;
  const double gamma = std::sqrt(32.0);
  s.add("discrete", "minimiser independent of initialisation", [&] {
    const auto a = discrete::newton_minimize(n, gamma);
    std::vector<double> uniform(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) uniform[static_cast<std::size_t>(i)] = 2.0 * std::sqrt(pot::kA) * i / n;
    const auto b = discrete::newton_minimize(n, gamma, discrete::WallConfiguration(gamma, uniform));
    double d = 0.0;
    for (int i = 0; i <= n; ++i) d = std::max(d, std::abs(a.config[i] - b.config[i]));
    return bound(d, 1e-8, "max_diff");
  });
  s.add("discrete", "minimiser ordered with x_1 > 0", [&] {
    const auto m = discrete::newton_minimize(n, gamma);
    bool ok = m.config[1] > 0.0;
    for (int i = 0; i < n; ++i) ok = ok && m.config[i] < m.config[i + 1];
    return std::pair{ok, "x_1=" + fmt(m.config[1])};
  });
  s.add("discrete", "energy non-increasing along newton", [&] {
    const auto m = discrete::newton_minimize(n, gamma);
    double rise = 0.0;
    for (std::size_t k = 1; k < m.energy_history.size(); ++k) {
      rise = std::max(rise, m.energy_history[k] - m.energy_history[k - 1]);
    }
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(m.energy_history.front());
    return bound(rise, slack, "max_rise");
  });
  s.add("discrete", "density positive", [&] {
    const auto rho = discrete::discrete_density(discrete::newton_minimize(n, gamma).config);
    const double lo = *std::min_element(rho.value.begin(), rho.value.end());
    return std::pair{lo > 0.0, "min=" + fmt(lo)};
  });
  s.add("discrete", "bulk consistency n = 128", [] {
    const int m = 128;
    const auto rho = discrete::discrete_density(discrete::newton_minimize(m, std::sqrt(double(m))).config);
    const double L = 2.0 * std::sqrt(pot::kA);
    double worst = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      const double x = rho.location[k];
      if (x >= L / 3.0 && x <= 2.0 * L / 3.0) {
        worst = std::max(worst, std::abs(rho.value[k] - ct::rho_star(x, ct::kUnrescaled)));
      }
    }
    return bound(worst, 0.1 * ct::rho_star(std::sqrt(pot::kA), ct::kUnrescaled), "max_dev");
  });
  s.add("discrete", "gamma from physical parameters", [] {
    const double g = discrete::gamma_from_physical({2.0, 0.5, 0.25, 64});
    return std::pair{std::abs(g - std::sqrt(64.0 * 2.0 / (0.25 * 0.5))) < 1e-12, "gamma=" + fmt(g)};
  });
}

void continuum_checks(Suite& s) {
  s.add("continuum", "spectral form equals interaction", [] {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> cells(1, 6);
    std::uniform_real_distribution<double> start(0.0, 2.0);
    std::uniform_real_distribution<double> len(0.5, 4.0);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double lo = start(rng);
      const auto nu = random_step(rng, cells(rng), lo, lo + len(rng), 1.0);
      const double direct = ct::interaction(nu);
      worst = std::max(worst, std::abs(ct::spectral_quadratic_form(nu) - direct) / (1.0 + std::abs(direct)));
    }
    return bound(worst, 1e-6, "max_rel_err");
  });
  s.add("continuum", "spectral form non-negative", [] {
    std::mt19937_64 rng(32);
    double lowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) lowest = std::min(lowest, ct::spectral_quadratic_form(random_step(rng, 4, 0.0, 3.0, 1.0)));
    return std::pair{lowest >= 0.0, "min=" + fmt(lowest)};
  });
  s.add("continuum", "h_gamma antisymmetry", [] {
    double worst = 0.0;
    for (double gamma : {1.0, 10.0, 100.0}) {
      const double L = 2.0 * gamma * std::sqrt(pot::kA);
      for (int k = 0; k <= 50; ++k) {
        const double x = L * k / 50.0;
        worst = std::max(worst, std::abs(ct::h_gamma(x, gamma) + ct::h_gamma(L - x, gamma)));
      }
    }
    return bound(worst, 1e-12, "max_err");
  });
  s.add("continuum", "h_gamma non-decreasing and bounded", [] {
    bool ok = true;
    double peak_ratio = 0.0;
    for (double gamma : {1.0, 10.0, 100.0}) {
      const double L = 2.0 * gamma * std::sqrt(pot::kA);
      double prev = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < 100; ++k) {
        const double h = ct::h_gamma(L * k / 99.0, gamma);
        ok = ok && h >= prev;
        prev = h;
        peak_ratio = std::max(peak_ratio, std::abs(h) / ct::h_gamma_bound(gamma));
      }
    }
    return std::pair{ok && peak_ratio <= 1.0, std::string(ok ? "monotone" : "not monotone") + " max|h|/bound=" + fmt(peak_ratio)};
  });
  s.add("continuum", "F strictly convex", [] {
    std::mt19937_64 rng(33);
    int bad = 0;
    for (int k = 0; k < 5; ++k) {
      const auto a = random_step(rng, 5, 0.0, 3.0, 0.5);
      auto vb = random_step(rng, 5, 0.0, 3.0, 0.5).values();
      const ct::PiecewiseConstantDensity b(a.breakpoints(), vb);
      std::vector<double> mid(vb.size());
      for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a.value(int(i)) + vb[i]);
      const ct::PiecewiseConstantDensity m(a.breakpoints(), mid);
      if (!(ct::first_order_energy(m) < 0.5 * (ct::first_order_energy(a) + ct::first_order_energy(b)))) ++bad;
    }
    return std::pair{bad == 0, "violations=" + std::to_string(bad)};
  });
  s.add("continuum", "rho_* minimises E among candidates", [] {
    const double L = 2.0 * std::sqrt(pot::kA);
    const double best = ct::zero_order_energy(
        ct::PiecewiseConstantDensity::sampled([](double x) { return ct::rho_star(x, ct::kUnrescaled); }, 0.0, L, 400));
    double lowest_other = std::numeric_limits<double>::infinity();
    for (double len : {0.5 * L, 0.8 * L, 1.2 * L, 2.0 * L}) {
      lowest_other = std::min(lowest_other, ct::zero_order_energy(ct::PiecewiseConstantDensity({0.0, len}, {1.0 / len})));
      const auto tri = [len](double x) { return 2.0 / len * (1.0 - x / len); };
      lowest_other = std::min(lowest_other, ct::zero_order_energy(ct::PiecewiseConstantDensity::sampled(tri, 0.0, len, 400)));
    }
    return std::pair{best < lowest_other, "E(rho_*)=" + fmt(best) + " best_other=" + fmt(lowest_other)};
  });
  s.add("continuum", "bulk density slope and support", [] {
    const double gamma = 7.0;
    const double L = 2.0 * gamma * std::sqrt(pot::kA);
    const double slope = (ct::rho_star(1.0, gamma) - ct::rho_star(0.0, gamma));
    const bool ok = std::abs(slope + 1.0 / (2.0 * pot::kA * gamma)) < 1e-14 && ct::rho_star(L * (1 + 1e-12), gamma) == 0.0 &&
                    ct::rho_star(L * (1 - 1e-6), gamma) > 0.0;
    return std::pair{ok, "slope=" + fmt(slope)};
  });
}

void boundary_layer_checks(Suite& s) {
  const auto grid = bl::build_grid();
  const auto sol = bl::solve_nu_star(grid);
  s.add("boundary_layer", "geometric sum", [&] {
    return bound(std::abs(grid.breakpoints().back() - grid.reach_closed_form()) / grid.reach_closed_form(), 1e-12, "rel_err");
  });
  s.add("boundary_layer", "grid targets", [&] {
    const int j = grid.cell_containing(1.0);
    const double w = grid.breakpoints()[std::size_t(j)] - grid.breakpoints()[std::size_t(j) - 1];
    const bool ok = std::abs(grid.breakpoints()[1] - grid.C() * grid.b()) < 1e-18 && std::abs(w - 0.1) <= 0.002 &&
                    grid.cell_containing(200.0) == grid.N();
    return std::pair{ok, "width_at_one=" + fmt(w) + " N=" + std::to_string(grid.N())};
  });
  s.add("boundary_layer", "midpoint residuals", [&] {
    double worst = 0.0;
    for (const auto& [y, r] : sol.residual_report) worst = std::max(worst, std::abs(r));
    return bound(worst, 1e-10, "max_residual");
  });
  s.add("boundary_layer", "lower bound and dip", [&] {
    const auto dip = bl::dip_metrics(sol);
    const bool ok = sol.lower_bound_ok && sol.lambda(0) > 0.0 && dip.min_value < 0.0;
    return std::pair{ok, "lambda_1=" + fmt(sol.lambda(0)) + " min=" + fmt(dip.min_value)};
  });
  const auto fine = bl::solve_nu_star(grid.refined());
  s.add("boundary_layer", "grid refinement", [&] {
    // Fine solution averaged over each coarse cell against the coarse value,
    // over [a_1, 10], relative to sup |nu_*|.
    double diff = 0.0;
    double peak = 0.0;
    for (int i = 0; i < grid.N(); ++i) peak = std::max(peak, std::abs(sol.lambda(i)));
    for (int i = 1; i < grid.N(); ++i) {
      if (grid.breakpoints()[std::size_t(i) + 1] > 10.0) break;
      const double avg = (fine.lambda(2 * i) * fine.nu_star.width(2 * i) +
                          fine.lambda(2 * i + 1) * fine.nu_star.width(2 * i + 1)) / sol.nu_star.width(i);
      diff = std::max(diff, std::abs(avg - sol.lambda(i)));
    }
    return bound(diff / peak, 0.02, "rel_change");
  });
  s.add("boundary_layer", "mass stable under refinement", [&] {
    const double m0 = bl::mass(sol);
    const double m1 = bl::mass(fine);
    return std::pair{std::abs(m1 - m0) <= 0.05 * std::abs(m0), "mass=" + fmt(m0) + " refined=" + fmt(m1)};
  });
  s.add("boundary_layer", "matched density tends to rho_*", [&] {
    std::vector<double> sup;
    for (double gamma : {1e2, 1e3}) {
      double d = 0.0;
      for (int k = 0; k <= 200; ++k) {
        const double x = 0.01 + (2.0 * std::sqrt(pot::kA) - 0.01) * k / 200.0;
        d = std::max(d, std::abs(bl::matched_density(sol, gamma, x) - ct::rho_star(x, ct::kUnrescaled)));
      }
      sup.push_back(d);
    }
    return std::pair{sup[1] < sup[0], "sup_gap(1e2)=" + fmt(sup[0]) + " sup_gap(1e3)=" + fmt(sup[1])};
  });
}

void scaling_checks(Suite& s, unsigned threads) {
  const std::vector<int> ns{8, 16, 32, 64, 128};
  std::vector<scaling::GammaRule> rules{scaling::GammaRule::power(1, 2)};
  const auto report = scaling::exponent_table(ns, rules, {}, threads);
  s.add("scaling", "alpha non-negative, p present", [&] {
    bool ok = true;
    for (const auto& r : report.rows) ok = ok && r.alpha >= 0.0 && r.p.has_value();
    return std::pair{ok, "rows=" + std::to_string(report.rows.size())};
  });
  s.add("scaling", "p decreasing towards 1/2 for sqrt(n)", [&] {
    bool ok = true;
    for (std::size_t k = 1; k < report.rows.size(); ++k) ok = ok && *report.rows[k].p < *report.rows[k - 1].p;
    const double last = *report.rows.back().p;
    return std::pair{ok && std::abs(last - 0.5) < 0.05, "p_last=" + fmt(last)};
  });
  s.add("scaling", "p stable under a tighter newton tolerance", [&] {
    discrete::NewtonOptions tight;
    tight.tol = 1e-11;
    const auto again = scaling::exponent_table(ns, rules, tight, threads);
    double worst = 0.0;
    for (std::size_t k = 0; k < report.rows.size(); ++k) worst = std::max(worst, std::abs(*again.rows[k].p - *report.rows[k].p));
    return bound(worst, 1e-3, "max_change");
  });
}

void cli_checks(Suite& s) {
  s.add("cli", "deterministic output", [] {
    cli::RunConfig c;
    c.command = cli::Command::minimize;
    c.n = 16;
    std::ostringstream a;
    std::ostringstream b;
    std::ostringstream err;
    const int ra = cli::run(c, a, err);
    const int rb = cli::run(c, b, err);
    return std::pair{ra == 0 && rb == 0 && a.str() == b.str(), "bytes=" + std::to_string(a.str().size())};
  });
  s.add("cli", "csv round trip", [] {
    csv::Table t;
    t.comments = {"meta: check"};
    t.header = {"n", "label", "x"};
    t.rows = {{std::int64_t{1}, std::string("a,\"b\""), 0.1}, {std::int64_t{2}, csv::Cell{}, 1e-300}};
    const std::string text = csv::to_string(t);
    return std::pair{csv::to_string(csv::parse(text)) == text, "bytes=" + std::to_string(text.size())};
  });
}

}  // namespace

std::vector<Check> run_all(unsigned threads) {
  Suite s;
  potential_checks(s);
  discrete_checks(s);
  continuum_checks(s);
  boundary_layer_checks(s);
  scaling_checks(s, threads);
  cli_checks(s);
  return s.take();
}

}  // namespace pileup::verify
