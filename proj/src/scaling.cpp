#include "pileup/scaling.hpp"

#include "pileup/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

namespace pileup::scaling {

GammaRule GammaRule::power(int numerator, int denominator) {
  if (numerator <= 0 || denominator <= 0) throw DomainError("gamma exponent must be positive");
  return GammaRule(std::to_string(numerator) + "/" + std::to_string(denominator),
                   static_cast<double>(numerator) / denominator, 0.0);
}

GammaRule GammaRule::fixed(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("gamma value must be positive");
  return GammaRule("value:" + std::to_string(value), std::nullopt, value);
}

GammaRule GammaRule::parse(const std::string& text) {
  if (text == "1/4") return power(1, 4);
  if (text == "1/2") return power(1, 2);
  if (text == "3/4") return power(3, 4);
  constexpr std::string_view prefix = "value:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string number = text.substr(prefix.size());
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(number, &used);
    } catch (const std::exception&) {
      throw DomainError("cannot parse gamma value '" + number + "'");
    }
    if (used != number.size()) throw DomainError("cannot parse gamma value '" + number + "'");
    GammaRule rule = fixed(v);
    rule.label_ = text;
    return rule;
  }
  throw DomainError("unknown gamma rule '" + text + "' (expected 1/4, 1/2, 3/4 or value:<float>)");
}

double GammaRule::gamma(int n) const {
  if (exponent_) return std::pow(static_cast<double>(n), *exponent_);
  return value_;
}

double alpha(int n, double gamma, const discrete::NewtonOptions& options) {
  if (n < 2) throw DomainError("alpha needs n >= 2");
  const auto bulk = discrete::bulk_positions(n, gamma);
  const auto minimum = discrete::newton_minimize(n, gamma, bulk, options);
  return discrete::energy(bulk) - discrete::energy(minimum.config);
}

ScalingReport exponent_table(const std::vector<int>& n_list, const std::vector<GammaRule>& rules,
                             const discrete::NewtonOptions& options, unsigned threads) {
  // Every (rule, n) pair that needs an alpha, including the doubled sizes.
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (int n : n_list) {
      if (n < 2) throw DomainError("scaling rows need n >= 2");
      for (int m : {n, 2 * n}) {
        if (std::find(jobs.begin(), jobs.end(), std::make_pair(r, m)) == jobs.end()) jobs.emplace_back(r, m);
      }
    }
  }

  std::vector<double> result(jobs.size(), 0.0);
  std::vector<std::exception_ptr> failure(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        const auto& [r, m] = jobs[k];
        result[k] = alpha(m, rules[r].gamma(m), options);
      } catch (...) {
        failure[k] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, jobs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failure) {
    if (f) std::rethrow_exception(f);
  }

  std::map<std::pair<std::size_t, int>, double> value;
  for (std::size_t k = 0; k < jobs.size(); ++k) value[jobs[k]] = result[k];

  ScalingReport report;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (int n : n_list) {
      const double an = value.at({r, n});
      std::optional<double> p;
      if (auto it = value.find({r, 2 * n}); it != value.end() && an > 0.0 && it->second > 0.0) {
        p = (std::log(an) - std::log(it->second)) / std::log(2.0);
      }
      report.rows.push_back(ScalingRow{n, rules[r].label(), rules[r].gamma(n), an, p});
    }
  }
  return report;
}

namespace {

double interpolate(const discrete::DensitySamples& s, double t) {
  const auto it = std::upper_bound(s.location.begin(), s.location.end(), t);
  const auto k = static_cast<std::size_t>(it - s.location.begin());
  if (k == s.size()) return s.value.back();
  if (k == 0) return s.value.front();
  const double w = (t - s.location[k - 1]) / (s.location[k] - s.location[k - 1]);
  return (1.0 - w) * s.value[k - 1] + w * s.value[k];
}

}  // namespace

double collapse_metric(const std::vector<discrete::DensitySamples>& runs) {
  if (runs.size() < 2) throw DomainError("collapse_metric needs at least two runs");
  std::vector<discrete::DensitySamples> unit;
  for (const auto& r : runs) {
    unit.push_back(r.restricted(0.0, 1.0));
    if (unit.back().size() == 0) throw DomainError("a run has no samples inside (0, 1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  for (const auto& r : unit) {
    lo = std::max(lo, r.location.front());
    hi = std::min(hi, r.location.back());
  }
  constexpr int kPoints = 200;
  double worst = 0.0;
  int used = 0;
  for (int k = 0; k < kPoints; ++k) {
    const double t = 0.01 + (0.99 - 0.01) * k / (kPoints - 1);
    if (t < lo || t > hi) continue;
    ++used;
    for (std::size_t i = 0; i < unit.size(); ++i) {
      for (std::size_t j = i + 1; j < unit.size(); ++j) {
        worst = std::max(worst, std::abs(interpolate(unit[i], t) - interpolate(unit[j], t)));
      }
    }
  }
  if (used == 0) throw DomainError("runs share no comparison point in (0.01, 0.99)");
  return worst;
}

double max_abs_on_unit(const std::vector<discrete::DensitySamples>& runs) {
  double m = 0.0;
  for (const auto& r : runs) {
    const auto u = r.restricted(0.0, 1.0);
    for (double v : u.value) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace pileup::scaling
