#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pileup {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at a point where the potential (or a derivative) diverges.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wall positions that are out of order or that the line search cannot keep ordered.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A density outside the admissible class of the functional it was passed to.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid targets that no geometric grid can meet.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular or badly conditioned linear system.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Newton iteration ran out of iterations. Carries the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate, double residual)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

}  // namespace pileup
