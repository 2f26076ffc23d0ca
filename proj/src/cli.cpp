#include "pileup/cli.hpp"

#include "pileup/continuum.hpp"
#include "pileup/csv.hpp"
#include "pileup/discrete.hpp"
#include "pileup/errors.hpp"
#include "pileup/potential.hpp"
#include "pileup/scaling.hpp"
#include "pileup/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

namespace pileup::cli {

namespace {

using csv::Cell;

std::string num(double v) { return csv::format_number(v); }

std::string meta_line(const RunConfig& c) {
  std::ostringstream os;
  os << "meta: pileup " << PILEUP_VERSION << " command=" << command_name(c.command);
  switch (c.command) {
    case Command::minimize:
    case Command::matched:
      os << " n=" << c.n << " gamma_rule=" << c.gamma_rule << " newton_tol=" << num(c.tolerances.newton);
      break;
    case Command::boundary_layer:
      os << " a1=" << num(c.grid.a1) << " width_at_one=" << num(c.grid.width_at_one)
         << " reach=" << num(c.grid.reach);
      break;
    case Command::scaling_table: {
      os << " rules=";
      for (std::size_t i = 0; i < c.rules.size(); ++i) os << (i ? "," : "") << c.rules[i];
      os << " nmin=" << c.nmin << " nmax=" << c.nmax << " newton_tol=" << num(c.tolerances.newton);
      break;
    }
    case Command::verify:
      break;
  }
  return os.str();
}

void emit(const csv::Table& table, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << csv::to_string(table);
  } else {
    csv::write_csv(table, path);
  }
}

discrete::NewtonOptions newton_options(const RunConfig& c) {
  discrete::NewtonOptions o;
  o.tol = c.tolerances.newton;
  return o;
}

double gamma_for(const RunConfig& c) { return scaling::GammaRule::parse(c.gamma_rule).gamma(c.n); }

int cmd_minimize(const RunConfig& c, std::ostream& out) {
  const double gamma = gamma_for(c);
  const auto result = discrete::newton_minimize(c.n, gamma, std::nullopt, newton_options(c));
  const auto& x = result.config;
  const auto rho = discrete::discrete_density(x);

  csv::Table t;
  t.comments.push_back(meta_line(c));
  t.comments.push_back("gamma=" + num(gamma) + " iterations=" + std::to_string(result.iterations) +
                       " residual=" + num(result.residual) +
                       " energy=" + num(result.energy_history.back()));
  t.header = {"i", "x", "rho_n", "rho_star", "gamma_x", "nu_n"};
  for (int i = 0; i <= c.n; ++i) {
    const double xi = x[i];
    const double bulk = continuum::rho_star(xi, continuum::kUnrescaled);
    Cell density;
    Cell nu;
    if (i >= 1 && i < c.n) {
      const double r = rho.value[static_cast<std::size_t>(i) - 1];
      density = r;
      nu = r - continuum::rho_star(gamma * xi, gamma);
    }
    t.rows.push_back({std::int64_t{i}, xi, density, bulk, gamma * xi, nu});
  }
  emit(t, c.output_path, out);
  return kExitOk;
}

int cmd_boundary_layer(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto grid = boundary_layer::build_grid(c.grid);
  const auto sol = boundary_layer::solve_nu_star(grid);
  const auto dip = boundary_layer::dip_metrics(sol);

  csv::Table t;
  t.comments.push_back(meta_line(c));
  t.comments.push_back("grid: C=" + num(grid.C()) + " b=" + num(grid.b()) + " N=" + std::to_string(grid.N()));
  t.comments.push_back("dip: min_lambda=" + num(dip.min_value) + " min_location=" + num(dip.min_location) +
                       " sign_changes=" + std::to_string(dip.sign_changes));
  t.comments.push_back("mass=" + num(boundary_layer::mass(sol)) + " condition=" + num(sol.condition_estimate) +
                       " lower_bound_ok=" + (sol.lower_bound_ok ? "true" : "false"));
  t.header = {"a_left", "a_right", "y_mid", "lambda", "residual_mid"};
  for (int i = 0; i < grid.N(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    t.rows.push_back({grid.breakpoints()[k], grid.breakpoints()[k + 1], grid.midpoints()[k], sol.lambda(i),
                      sol.residual_report[k].second});
  }
  emit(t, c.output_path, out);

  if (!c.affine_path.empty()) {
    csv::Table a;
    a.comments.push_back(meta_line(c));
    a.header = {"y", "nu_affine"};
    const double hi = grid.breakpoints().back();
    const int m = std::max(2, c.affine_points);
    for (int k = 0; k < m; ++k) {
      const double y = hi * k / (m - 1);
      a.rows.push_back({y, boundary_layer::affine_profile(sol, y)});
    }
    csv::write_csv(a, c.affine_path);
  }
  if (!sol.lower_bound_ok) err << "pileup: warning: inf nu_* > -rho_*(0) does not hold on this grid\n";
  return kExitOk;
}

int cmd_matched(const RunConfig& c, std::ostream& out) {
  const double gamma = gamma_for(c);
  const auto result = discrete::newton_minimize(c.n, gamma, std::nullopt, newton_options(c));
  const auto rho = discrete::discrete_density(result.config);
  const auto sol = boundary_layer::solve_nu_star(boundary_layer::build_grid(c.grid));

  const double left_fifth = 2.0 * std::sqrt(potential::kA) / 5.0;
  double gap_bulk = 0.0;
  double gap_matched = 0.0;
  csv::Table t;
  t.header = {"x", "rho_n", "rho_star", "rho_matched"};
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const double x = rho.location[k];
    const double bulk = continuum::rho_star(x, continuum::kUnrescaled);
    const double matched = boundary_layer::matched_density(sol, gamma, x);
    if (x <= left_fifth) {
      gap_bulk = std::max(gap_bulk, std::abs(rho.value[k] - bulk));
      gap_matched = std::max(gap_matched, std::abs(rho.value[k] - matched));
    }
    t.rows.push_back({x, rho.value[k], bulk, matched});
  }
  t.comments.push_back(meta_line(c));
  t.comments.push_back("gamma=" + num(gamma) + " left_fifth_gap_rho_star=" + num(gap_bulk) +
                       " left_fifth_gap_matched=" + num(gap_matched));
  emit(t, c.output_path, out);
  return kExitOk;
}

int cmd_scaling_table(const RunConfig& c, std::ostream& out) {
  std::vector<scaling::GammaRule> rules;
  for (const auto& r : c.rules) rules.push_back(scaling::GammaRule::parse(r));
  std::vector<int> ns;
  for (int n = c.nmin; n <= c.nmax; n *= 2) ns.push_back(n);
  if (ns.empty()) throw DomainError("nmin must not exceed nmax");

  const auto report = scaling::exponent_table(ns, rules, newton_options(c), effective_threads(c.threads));
  csv::Table t;
  t.comments.push_back(meta_line(c));
  t.header = {"n", "gamma_rule", "gamma", "alpha", "p"};
  for (const auto& row : report.rows) {
    Cell p;
    if (row.p) p = *row.p;
    t.rows.push_back({std::int64_t{row.n}, row.gamma_rule, row.gamma, row.alpha, p});
  }
  emit(t, c.output_path, out);
  return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  const auto checks = verify::run_all(effective_threads(c.threads));
  csv::Table t;
  t.comments.push_back(meta_line(c));
  t.header = {"module", "check", "status", "detail"};
  bool all = true;
  for (const auto& k : checks) {
    all = all && k.ok;
    t.rows.push_back({k.module, k.name, std::string(k.ok ? "pass" : "FAIL"), k.detail});
  }
  emit(t, c.output_path, out);
  return all ? kExitOk : kExitVerify;
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::minimize: return "minimize";
    case Command::boundary_layer: return "boundary-layer";
    case Command::matched: return "matched";
    case Command::scaling_table: return "scaling-table";
    case Command::verify: return "verify";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::minimize, Command::boundary_layer, Command::matched, Command::scaling_table,
                    Command::verify}) {
    if (command_name(c) == name) return c;
  }
  return std::nullopt;
}

int parse_count(const std::string& text) {
  const auto bad = [&] { return DomainError("expected a positive integer or 2^k, got '" + text + "'"); };
  const auto to_int = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
      throw bad();
    }
    if (s.size() > 9) throw bad();
    return std::stoi(s);
  };
  int value = 0;
  if (const auto caret = text.find('^'); caret != std::string::npos) {
    const int base = to_int(text.substr(0, caret));
    const int exp = to_int(text.substr(caret + 1));
    const double v = std::pow(static_cast<double>(base), exp);
    if (v > 1e9) throw bad();
    value = static_cast<int>(std::lround(v));
  } else {
    value = to_int(text);
  }
  if (value < 1) throw bad();
  return value;
}

unsigned effective_threads(unsigned requested) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* env = std::getenv("PILEUP_THREADS"); env && *env) {
    try {
      const int cap = parse_count(env);
      t = std::min(t, static_cast<unsigned>(cap));
    } catch (const DomainError&) {
      // An unusable cap is ignored.
    }
  }
  return t;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.n < 2) throw DomainError("n must be at least 2");
    if (!(config.tolerances.newton > 0.0)) throw DomainError("newton tolerance must be positive");
    switch (config.command) {
      case Command::minimize: return cmd_minimize(config, out);
      case Command::boundary_layer: return cmd_boundary_layer(config, out, err);
      case Command::matched: return cmd_matched(config, out);
      case Command::scaling_table: return cmd_scaling_table(config, out);
      case Command::verify: return cmd_verify(config, out);
    }
  } catch (const DomainError& e) {
    err << "pileup: invalid parameters: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConstructionError& e) {
    err << "pileup: invalid parameters: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "pileup: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ConvergenceError& e) {
    err << "pileup: solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitSolver;
  } catch (const std::ios_base::failure& e) {
    err << "pileup: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    err << "pileup: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

int main_with_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dislocation-wall pile-up solver"};
  app.set_version_flag("--version", std::string(PILEUP_VERSION));
  app.require_subcommand(1, 1);

  RunConfig cfg;
  std::string nmin = "2^3";
  std::string nmax = "2^8";
  std::string n_text = "2^7";
  std::string rules_text = "1/4,1/2,3/4";

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", cfg.output_path, "CSV output path (default: standard output)");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  };
  const auto add_discrete = [&](CLI::App* sub) {
    sub->add_option("-n,--n", n_text, "number of free walls (integer or 2^k)")->capture_default_str();
    sub->add_option("--gamma", cfg.gamma_rule, "1/4, 1/2, 3/4 or value:<float>")->capture_default_str();
    sub->add_option("--newton-tol", cfg.tolerances.newton, "gradient max-norm tolerance")->capture_default_str();
  };
  const auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--a1", cfg.grid.a1, "first breakpoint")->capture_default_str();
    sub->add_option("--width-at-one", cfg.grid.width_at_one, "width of the cell holding x = 1")->capture_default_str();
    sub->add_option("--reach", cfg.grid.reach, "point inside the last cell")->capture_default_str();
  };

  auto* minimize = app.add_subcommand("minimize", "discrete minimiser and densities");
  add_common(minimize);
  add_discrete(minimize);

  auto* bl = app.add_subcommand("boundary-layer", "collocation solution of the boundary-layer problem");
  add_common(bl);
  add_grid(bl);
  bl->add_option("--affine-out", cfg.affine_path, "also write the piecewise-linear profile here");
  bl->add_option("--affine-points", cfg.affine_points, "samples of the piecewise-linear profile")->capture_default_str();

  auto* matched = app.add_subcommand("matched", "discrete density against the bulk and matched densities");
  add_common(matched);
  add_discrete(matched);
  add_grid(matched);

  auto* table = app.add_subcommand("scaling-table", "energy gaps and power-law exponents");
  add_common(table);
  table->add_option("--rules", rules_text, "comma-separated gamma rules")->capture_default_str();
  table->add_option("--nmin", nmin, "smallest n (integer or 2^k)")->capture_default_str();
  table->add_option("--nmax", nmax, "largest n (integer or 2^k)")->capture_default_str();
  table->add_option("--newton-tol", cfg.tolerances.newton, "gradient max-norm tolerance")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  add_common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << PILEUP_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pileup: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    cfg.command = *parse_command(app.get_subcommands().front()->get_name());
    cfg.n = parse_count(n_text);
    cfg.nmin = parse_count(nmin);
    cfg.nmax = parse_count(nmax);
    cfg.rules.clear();
    std::stringstream ss(rules_text);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) cfg.rules.push_back(item);
    }
    if (cfg.rules.empty()) throw DomainError("no gamma rules given");
    for (const auto& r : cfg.rules) scaling::GammaRule::parse(r);
    scaling::GammaRule::parse(cfg.gamma_rule);
  } catch (const DomainError& e) {
    err << "pileup: invalid parameters: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(cfg, out, err);
}

}  // namespace pileup::cli
