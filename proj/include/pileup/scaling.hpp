#pragma once

// Energy gap between the discrete minimiser and the bulk positions, its
// two-point power-law exponents, and a collapse measure for rescaled
// boundary-layer profiles.

#include "pileup/discrete.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pileup::scaling {

/// gamma_n = n^p for p in {1/4, 1/2, 3/4}, or a fixed value.
class GammaRule {
 public:
  static GammaRule power(int numerator, int denominator);
  static GammaRule fixed(double value);
  /// Accepts "1/4", "1/2", "3/4" and "value:<float>". Throws DomainError otherwise.
  static GammaRule parse(const std::string& text);

  double gamma(int n) const;
  const std::string& label() const noexcept { return label_; }

 private:
  GammaRule(std::string label, std::optional<double> exponent, double value)
      : label_(std::move(label)), exponent_(exponent), value_(value) {}
  std::string label_;
  std::optional<double> exponent_;
  double value_;
};

/// alpha_n = E_n(bulk positions) - E_n(minimiser).
double alpha(int n, double gamma, const discrete::NewtonOptions& options = {});

struct ScalingRow {
  int n;
  std::string gamma_rule;
  double gamma;
  double alpha;
  std::optional<double> p;  ///< (log alpha_n - log alpha_{2n}) / log 2
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
};

/// One row per (rule, n); alpha is also computed at 2n so every row carries p.
/// Minimisations run on up to `threads` worker threads (0 = hardware
/// concurrency); the result does not depend on the thread count.
ScalingReport exponent_table(const std::vector<int>& n_list, const std::vector<GammaRule>& rules,
                             const discrete::NewtonOptions& options = {}, unsigned threads = 1);

/// Largest pairwise deviation between runs on 200 equispaced points of
/// [0.01, 0.99], each run linearly interpolated. Points outside the sampled
/// range of any run are skipped. Throws DomainError for fewer than two runs
/// or no usable comparison point.
double collapse_metric(const std::vector<discrete::DensitySamples>& runs);

/// max |value| over the part of the runs inside (0, 1).
double max_abs_on_unit(const std::vector<discrete::DensitySamples>& runs);

}  // namespace pileup::scaling
