#pragma once

#include "contour/core.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace contour {

/// Axis-aligned search box. Construction validates lower < upper per axis.
template <typename Scalar>
class BoxDomain {
 public:
  BoxDomain(Point<Scalar> lower, Point<Scalar> upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() == 0 || lower_.size() != upper_.size())
      throw ConfigurationError("box bounds must be non-empty and of equal length");
    if (!(lower_.array() < upper_.array()).all())
      throw ConfigurationError("box requires lower[k] < upper[k] on every axis");
  }

  static BoxDomain cube(Eigen::Index dim, Scalar lo, Scalar hi) {
    return BoxDomain(Point<Scalar>::Constant(dim, lo), Point<Scalar>::Constant(dim, hi));
  }

  Eigen::Index dim() const { return lower_.size(); }
  const Point<Scalar>& lower() const { return lower_; }
  const Point<Scalar>& upper() const { return upper_; }
  Point<Scalar> extent() const { return upper_ - lower_; }
  Scalar diagonal() const { return extent().norm(); }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x) const {
    return x.size() == dim() && (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
  }

  template <typename Derived>
  Point<Scalar> clamp(const Eigen::MatrixBase<Derived>& x) const {
    return x.cwiseMax(lower_).cwiseMin(upper_);
  }

  /// Intersection with another box; throws when the overlap is degenerate.
  BoxDomain intersect(const BoxDomain& other) const {
    return BoxDomain(lower_.cwiseMax(other.lower_), upper_.cwiseMin(other.upper_));
  }

  bool operator==(const BoxDomain&) const = default;

 private:
  Point<Scalar> lower_;
  Point<Scalar> upper_;
};

template <typename Scalar>
struct KnownMinimum {
  Point<Scalar> point;
  Scalar value;
};

/// Scalar field over a box, with a shared evaluation counter.
///
/// Copies share the counter, so an objective handed to several components
/// reports the total cost of a run.
template <typename Scalar>
class Objective {
 public:
  using Function = std::function<Scalar(const Point<Scalar>&)>;

  Objective(std::string name, BoxDomain<Scalar> domain, Function f,
            std::optional<KnownMinimum<Scalar>> known = std::nullopt)
      : name_(std::move(name)),
        domain_(std::move(domain)),
        f_(std::move(f)),
        known_(std::move(known)),
        counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  const std::string& name() const { return name_; }
  const BoxDomain<Scalar>& domain() const { return domain_; }
  Eigen::Index dim() const { return domain_.dim(); }
  const std::optional<KnownMinimum<Scalar>>& known_minimum() const { return known_; }

  /// Unchecked, uncounted evaluation. Callers doing bulk work add their
  /// own tally through count().
  Scalar raw(const Point<Scalar>& x) const { return f_(x); }

  void count(std::uint64_t n) const { counter_->fetch_add(n, std::memory_order_relaxed); }
  std::uint64_t evaluations() const { return counter_->load(std::memory_order_relaxed); }

 private:
  std::string name_;
  BoxDomain<Scalar> domain_;
  Function f_;
  std::optional<KnownMinimum<Scalar>> known_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

using ObjectiveD = Objective<double>;
using BoxDomainD = BoxDomain<double>;

template <typename Scalar>
Scalar evaluate(const Objective<Scalar>& obj, const Point<Scalar>& x) {
  if (!obj.domain().contains(x)) throw DomainViolation("point outside the domain of '" + obj.name() + "'");
  obj.count(1);
  return obj.raw(x);
}

// Benchmark formulas. Free functions so they can be used on any Eigen
// expression, not only through an Objective.

template <typename Derived>
typename Derived::Scalar sphere(const Eigen::MatrixBase<Derived>& x) {
  return x.squaredNorm();
}

template <typename Derived>
typename Derived::Scalar mccormick(const Eigen::MatrixBase<Derived>& v) {
  using std::sin;
  const auto x = v(0), y = v(1);
  return sin(x + y) + (x - y) * (x - y) - typename Derived::Scalar(1.5) * x + typename Derived::Scalar(2.5) * y + 1;
}

template <typename Derived>
typename Derived::Scalar ackley(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  using std::cos;
  using std::exp;
  using std::sqrt;
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  const auto x = v(0), y = v(1);
  return -20 * exp(Scalar(-0.2) * sqrt(Scalar(0.5) * (x * x + y * y))) -
         exp(Scalar(0.5) * (cos(two_pi * x) + cos(two_pi * y))) + std::numbers::e_v<Scalar> + 20;
}

/// Builds one of the stock benchmarks: `sphere_<d>`, `mccormick`, `ackley`.
template <typename Scalar>
Objective<Scalar> make_benchmark(std::string_view name) {
  using P = Point<Scalar>;
  if (name.starts_with("sphere_")) {
    auto digits = name.substr(7);
    int d = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || d < 1)
      throw UnknownBenchmark("unknown benchmark '" + std::string(name) + "'");
    return Objective<Scalar>(std::string(name), BoxDomain<Scalar>::cube(d, -5, 5),
                             [](const P& x) { return sphere(x); }, KnownMinimum<Scalar>{P::Zero(d), Scalar(0)});
  }
  if (name == "mccormick") {
    P lo(2), hi(2), xmin(2);
    lo << Scalar(-1.5), -3;
    hi << 4, 4;
    xmin << Scalar(-0.54719), Scalar(-1.54719);
    return Objective<Scalar>("mccormick", BoxDomain<Scalar>(lo, hi), [](const P& x) { return mccormick(x); },
                             KnownMinimum<Scalar>{xmin, Scalar(-1.9133)});
  }
  if (name == "ackley") {
    return Objective<Scalar>("ackley", BoxDomain<Scalar>::cube(2, -5, 5), [](const P& x) { return ackley(x); },
                             KnownMinimum<Scalar>{P::Zero(2), Scalar(0)});
  }
  throw UnknownBenchmark("unknown benchmark '" + std::string(name) + "'");
}

}  // namespace contour
