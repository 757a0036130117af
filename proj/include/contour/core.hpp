#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace contour {

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using PointD = Point<double>;

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainViolation : public Error {
 public:
  using Error::Error;
};

class UnknownBenchmark : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class BracketInvalid : public Error {
 public:
  using Error::Error;
};

/// Bisection ran out of halvings before reaching the tolerance.
/// Carries the point with the smallest residual seen.
template <typename Scalar>
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, Point<Scalar> best, Scalar best_residual)
      : Error(what), best_(std::move(best)), best_residual_(best_residual) {}
  const Point<Scalar>& best() const { return best_; }
  Scalar best_residual() const { return best_residual_; }

 private:
  Point<Scalar> best_;
  Scalar best_residual_;
};

/// Fewer than two separated roots could be located on a level set.
class InsufficientRoots : public Error {
 public:
  InsufficientRoots(const std::string& what, std::size_t found) : Error(what), found_(found) {}
  std::size_t found() const { return found_; }

 private:
  std::size_t found_;
};

class EmptySubset : public Error {
 public:
  using Error::Error;
};

class EmptySet : public Error {
 public:
  using Error::Error;
};

class InsufficientTrace : public Error {
 public:
  using Error::Error;
};

class GridBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// No subset average fell below the contour level, even after retries.
template <typename Scalar>
class DescentStalled : public Error {
 public:
  DescentStalled(const std::string& what, Point<Scalar> best, Scalar best_value)
      : Error(what), best_(std::move(best)), best_value_(best_value) {}
  const Point<Scalar>& best() const { return best_; }
  Scalar best_value() const { return best_value_; }

 private:
  Point<Scalar> best_;
  Scalar best_value_;
};

}  // namespace contour
