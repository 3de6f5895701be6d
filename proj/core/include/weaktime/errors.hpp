#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weaktime {

// Input outside the physical domain of an operation (E <= 0, T ~ 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Result not representable in double precision.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::size_t panels, double residual)
      : std::runtime_error(what), panels_(panels), residual_(residual) {}
  std::size_t panels() const noexcept { return panels_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t panels_;
  double residual_;
};

// Coupling too strong for the first-order weak-measurement expansion.
class WeaknessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Postselection probability too small to condition on.
class RarePostselectionError : public std::runtime_error {
 public:
  RarePostselectionError(const std::string& what, double probability)
      : std::runtime_error(what), probability_(probability) {}
  double probability() const noexcept { return probability_; }

 private:
  double probability_;
};

// Conditional two-level time evaluated where the final-state probability vanishes.
class SingularityError : public DomainError {
 public:
  SingularityError(const std::string& what, int order)
      : DomainError(what), order_(order) {}
  int divergence_order() const noexcept { return order_; }

 private:
  int order_;
};

}  // namespace weaktime
