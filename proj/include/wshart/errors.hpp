#pragma once

#include <stdexcept>
#include <string>

namespace wshart {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested number of digits cannot be delivered or certified.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The coefficient recursion produced R_{k+1} <= 0 or fell below the floor.
class DegenerateRecursionError : public std::runtime_error {
 public:
  DegenerateRecursionError(const std::string& what, int index)
      : std::runtime_error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// A determinant lost too many digits to be trusted.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double certified_digits)
      : std::runtime_error(what), certified_digits_(certified_digits) {}
  double certified_digits() const noexcept { return certified_digits_; }

 private:
  double certified_digits_;
};

/// The square-root branch of the hard-edge ODE was lost.
class BranchLossError : public std::runtime_error {
 public:
  BranchLossError(const std::string& what, double x)
      : std::runtime_error(what), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// An iterative solve (Newton, ODE stepping, bisection) did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point lies outside the grid of a precomputed solution.
class GridError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace wshart
