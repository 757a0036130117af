#pragma once

#include "contour/core.hpp"
#include "contour/engine.hpp"
#include "contour/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <thread>
#include <vector>

namespace contour {

/// Largest pairwise Euclidean distance; 0 for a single point.
template <typename Scalar>
Scalar diameter(std::span<const Point<Scalar>> points) {
  if (points.empty()) throw EmptySet("diameter of an empty set");
  Scalar d2 = 0;
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) d2 = std::max(d2, (points[a] - points[b]).squaredNorm());
  return std::sqrt(d2);
}

template <typename Scalar>
Scalar diameter(const std::vector<Point<Scalar>>& points) {
  return diameter(std::span<const Point<Scalar>>(points));
}

template <typename Scalar>
Scalar diameter(const std::vector<Root<Scalar>>& roots) {
  std::vector<Point<Scalar>> pts;
  pts.reserve(roots.size());
  for (const auto& r : roots) pts.push_back(r.point);
  return diameter(std::span<const Point<Scalar>>(pts));
}

/// Empirical contraction of the level sets along a run.
///
/// The diameters are those of the sampled root sets, a proxy for the true
/// level-set diameters.
struct ContractionReport {
  std::vector<double> diameters;
  std::vector<double> ratios;
  double max_ratio = 0;
  double geometric_fit = 0;  // least-squares slope of log D_i against i

  bool operator==(const ContractionReport&) const = default;
};

inline ContractionReport contraction_report(std::vector<double> diameters) {
  if (diameters.size() < 2) throw InsufficientTrace("contraction report needs at least two diameters");
  ContractionReport rep;
  rep.diameters = std::move(diameters);
  const auto& d = rep.diameters;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    const double q = d[i] > 0 ? d[i + 1] / d[i] : std::numeric_limits<double>::infinity();
    rep.ratios.push_back(q);
  }
  rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());

  // Zero diameters have no logarithm and are left out of the fit.
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0)) continue;
    const double x = static_cast<double>(i), y = std::log(d[i]);
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  rep.geometric_fit = (n >= 2 && denom != 0) ? (n * sxy - sx * sy) / denom : 0.0;
  return rep;
}

template <typename Scalar>
ContractionReport contraction_report(const RunResult<Scalar>& result) {
  std::vector<double> d;
  for (const auto& rec : result.iterations)
    if (!rec.roots.empty()) d.push_back(static_cast<double>(diameter(rec.roots)));
  if (d.size() < 2) throw InsufficientTrace("contraction report needs at least two iterates with roots");
  return contraction_report(std::move(d));
}

template <typename Scalar>
struct GridMinimum {
  Point<Scalar> point;
  Scalar value;
};

inline constexpr std::uint64_t kDefaultGridBudget = 2'000'000'000ULL;

/// Exhaustive search over the regular grid with `resolution` nodes per axis,
/// endpoints included. Traversal is row-major (last axis fastest) and ties go
/// to the lowest linear index, so the answer does not depend on the number
/// of workers.
template <typename Scalar>
GridMinimum<Scalar> brute_force_min(const Objective<Scalar>& obj, int resolution,
                                    std::uint64_t budget = kDefaultGridBudget, unsigned workers = 0) {
  if (resolution < 2) throw ConfigurationError("grid resolution must be at least 2");
  const auto dim = static_cast<int>(obj.dim());
  const auto res = static_cast<std::uint64_t>(resolution);
  std::uint64_t total = 1;
  for (int k = 0; k < dim; ++k) {
    if (total > budget / res) throw GridBudgetExceeded("grid of " + std::to_string(resolution) + "^" +
                                                       std::to_string(dim) + " points exceeds the budget");
    total *= res;
  }

  const auto& box = obj.domain();
  std::vector<std::vector<Scalar>> axes(dim, std::vector<Scalar>(resolution));
  for (int k = 0; k < dim; ++k)
    for (int j = 0; j < resolution; ++j)
      axes[k][j] = j == resolution - 1
                       ? box.upper()(k)
                       : box.lower()(k) + (box.upper()(k) - box.lower()(k)) * static_cast<Scalar>(j) /
                                              static_cast<Scalar>(resolution - 1);

  struct Best {
    std::uint64_t index = 0;
    Scalar value = std::numeric_limits<Scalar>::infinity();
  };

  auto scan = [&](std::uint64_t begin, std::uint64_t end) {
    Best best;
    if (begin >= end) return best;
    std::vector<int> digit(dim);
    std::uint64_t rem = begin;
    for (int k = dim - 1; k >= 0; --k) {
      digit[k] = static_cast<int>(rem % res);
      rem /= res;
    }
    Point<Scalar> x(dim);
    for (int k = 0; k < dim; ++k) x(k) = axes[k][digit[k]];
    for (std::uint64_t i = begin; i < end; ++i) {
      const Scalar v = obj.raw(x);
      if (v < best.value) best = {i, v};
      for (int k = dim - 1; k >= 0; --k) {
        if (++digit[k] < resolution) {
          x(k) = axes[k][digit[k]];
          break;
        }
        digit[k] = 0;
        x(k) = axes[k][0];
      }
    }
    return best;
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, total));
  std::vector<Best> partial(workers);
  {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 1; w < workers; ++w)
      pool.emplace_back([&, w] { partial[w] = scan(w * chunk, std::min(total, (w + 1) * chunk)); });
    partial[0] = scan(0, std::min(total, chunk));
  }
  obj.count(total);

  Best best = partial[0];
  for (const auto& p : partial)
    if (p.value < best.value) best = p;  // chunks are in index order, so strict < keeps the lowest index

  Point<Scalar> x(dim);
  std::uint64_t rem = best.index;
  for (int k = dim - 1; k >= 0; --k) {
    x(k) = axes[k][rem % res];
    rem /= res;
  }
  return {x, best.value};
}

}  // namespace contour
