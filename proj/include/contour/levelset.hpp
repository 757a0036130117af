#pragma once

#include "contour/core.hpp"
#include "contour/objective.hpp"
#include "contour/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace contour {

/// A point on the contour f(x) = level.
template <typename Scalar>
struct Root {
  Point<Scalar> point;
  Scalar residual = 0;  // f(point) - level
  int iterate_index = 0;
  int root_index = 0;

  bool operator==(const Root&) const = default;
};

struct RootFindConfig {
  int n_roots = 32;
  double root_tolerance = 1e-10;
  std::optional<int> max_bracket_attempts;  // unset: 200 * n_roots
  std::optional<double> dedup_radius;       // unset: 1e-3 * sampling-box diagonal
  std::uint64_t rng_seed = 0;
  int bisection_max_iter = 200;

  int bracket_attempts() const { return max_bracket_attempts.value_or(200 * n_roots); }

  void validate() const {
    if (n_roots < 2) throw ConfigurationError("n_roots must be at least 2");
    if (!(root_tolerance > 0)) throw ConfigurationError("root_tolerance must be positive");
    if (dedup_radius && !(*dedup_radius >= 0)) throw ConfigurationError("dedup_radius must be non-negative");
    if (bracket_attempts() < 1) throw ConfigurationError("max_bracket_attempts must be positive");
    if (bisection_max_iter < 1) throw ConfigurationError("bisection_max_iter must be positive");
  }

  bool operator==(const RootFindConfig&) const = default;
};

/// Where sample_roots draws its bracket endpoints.
///
/// `box` defaults to the objective's domain. `anchor` is a point known to lie
/// on the contour (the current iterate); it seeds a local search when the
/// box yields no points on one side of the level.
template <typename Scalar>
struct SamplingRegion {
  std::optional<BoxDomain<Scalar>> box;
  std::optional<Point<Scalar>> anchor;
  int iterate_index = 0;
};

/// Bisection for f(a + t (b - a)) = level on t in [0, 1].
template <typename Scalar>
Root<Scalar> bisect_root(const Objective<Scalar>& obj, const Point<Scalar>& a, const Point<Scalar>& b, Scalar level,
                         Scalar tol, int max_iter) {
  const auto& box = obj.domain();
  const Scalar ga = evaluate(obj, a) - level;
  if (std::abs(ga) <= tol) return {a, ga};
  const Scalar gb = evaluate(obj, b) - level;
  if (std::abs(gb) <= tol) return {b, gb};
  if (std::signbit(ga) == std::signbit(gb))
    throw BracketInvalid("bracket endpoints lie on the same side of the level");

  const Point<Scalar> dir = b - a;
  Scalar lo = 0, hi = 1, glo = ga;
  Point<Scalar> best = std::abs(ga) <= std::abs(gb) ? a : b;
  Scalar best_g = std::abs(ga) <= std::abs(gb) ? ga : gb;

  for (int it = 0; it < max_iter; ++it) {
    const Scalar t = (lo + hi) / 2;
    if (t <= lo || t >= hi) break;  // interval exhausted at this precision
    Point<Scalar> x = box.clamp(a + t * dir);
    const Scalar g = evaluate(obj, x) - level;
    if (std::abs(g) < std::abs(best_g)) {
      best = x;
      best_g = g;
    }
    if (std::abs(g) <= tol) return {std::move(x), g};
    if (std::signbit(g) == std::signbit(glo)) {
      lo = t;
      glo = g;
    } else {
      hi = t;
    }
  }
  throw ConvergenceFailure<Scalar>("bisection did not reach the root tolerance", best, best_g);
}

namespace detail {

template <typename Scalar>
Point<Scalar> draw_in(const BoxDomain<Scalar>& box, Rng& rng) {
  Point<Scalar> x(box.dim());
  for (Eigen::Index k = 0; k < box.dim(); ++k)
    x(k) = static_cast<Scalar>(rng.uniform(static_cast<double>(box.lower()(k)), static_cast<double>(box.upper()(k))));
  return box.clamp(x);
}

template <typename Scalar>
struct Pools {
  std::vector<Point<Scalar>> below;
  std::vector<Point<Scalar>> above;

  // Points inside the tolerance band are on neither side.
  void classify(const Objective<Scalar>& obj, Point<Scalar> x, Scalar level, Scalar tol) {
    const Scalar g = evaluate(obj, x) - level;
    if (g < -tol)
      below.push_back(std::move(x));
    else if (g > tol)
      above.push_back(std::move(x));
  }
};

// Draws in boxes around the anchor until the sparse pool holds `want`
// points. The box keeps its size while rounds keep finding sparse points and
// halves after a round that finds none. The anchor sits on the contour, so
// both sides of the level are present in every neighbourhood unless it is a
// local extremum.
template <typename Scalar>
void local_search(const Objective<Scalar>& obj, const Point<Scalar>& anchor, Point<Scalar> half_width, Scalar level,
                  Scalar tol, std::size_t want, Rng& rng, Pools<Scalar>& pools) {
  constexpr int kRounds = 128;
  constexpr int kDrawsPerRound = 8;
  const auto& domain = obj.domain();
  auto& sparse = pools.below.size() < pools.above.size() ? pools.below : pools.above;
  for (int round = 0; round < kRounds && sparse.size() < want; ++round) {
    const Point<Scalar> lo = (anchor - half_width).cwiseMax(domain.lower());
    const Point<Scalar> hi = (anchor + half_width).cwiseMin(domain.upper());
    if (!(lo.array() < hi.array()).all()) return;
    const BoxDomain<Scalar> box(lo, hi);
    const std::size_t before = sparse.size();
    for (int k = 0; k < kDrawsPerRound; ++k) pools.classify(obj, draw_in(box, rng), level, tol);
    if (sparse.size() == before) half_width /= 2;
  }
}

}  // namespace detail

/// Collects up to cfg.n_roots separated roots on f(x) = level.
///
/// Uniform draws over the sampling box are split into a below-level and an
/// above-level pool; random cross-pool pairs are bisected. Roots closer than
/// the dedup radius are merged, keeping the smaller |residual|. Throws
/// InsufficientRoots when fewer than two remain.
template <typename Scalar>
std::vector<Root<Scalar>> sample_roots(const Objective<Scalar>& obj, Scalar level, const RootFindConfig& cfg, Rng& rng,
                                       const SamplingRegion<Scalar>& region = {}) {
  cfg.validate();
  const BoxDomain<Scalar>& box = region.box ? *region.box : obj.domain();
  const Scalar tol = static_cast<Scalar>(cfg.root_tolerance);
  const Scalar dedup = static_cast<Scalar>(cfg.dedup_radius.value_or(1e-3 * static_cast<double>(box.diagonal())));
  const auto want = static_cast<std::size_t>(cfg.n_roots);
  const int attempts = cfg.bracket_attempts();

  detail::Pools<Scalar> pools;
  for (int d = 0; d < attempts && (pools.below.size() < want || pools.above.size() < want); ++d)
    pools.classify(obj, detail::draw_in(box, rng), level, tol);

  if (region.anchor && (pools.below.size() < want || pools.above.size() < want)) {
    detail::local_search(obj, *region.anchor, Point<Scalar>(box.extent() / 2), level, tol, want, rng, pools);
    if (pools.below.empty()) pools.below.push_back(*region.anchor);
  }

  std::vector<Root<Scalar>> roots;
  if (!pools.below.empty() && !pools.above.empty()) {
    for (int k = 0; k < attempts && roots.size() < want; ++k) {
      const auto& b = pools.below[rng.index(pools.below.size())];
      const auto& a = pools.above[rng.index(pools.above.size())];
      Root<Scalar> r;
      try {
        r = bisect_root(obj, b, a, level, tol, cfg.bisection_max_iter);
      } catch (const ConvergenceFailure<Scalar>&) {
        continue;
      } catch (const BracketInvalid&) {
        continue;
      }
      auto dup = std::find_if(roots.begin(), roots.end(),
                              [&](const Root<Scalar>& q) { return (q.point - r.point).norm() <= dedup; });
      if (dup == roots.end())
        roots.push_back(std::move(r));
      else if (std::abs(r.residual) < std::abs(dup->residual))
        *dup = std::move(r);
    }
  }

  if (roots.size() < 2)
    throw InsufficientRoots("found " + std::to_string(roots.size()) + " separated root(s) on the level set",
                            roots.size());
  for (std::size_t j = 0; j < roots.size(); ++j) {
    roots[j].iterate_index = region.iterate_index;
    roots[j].root_index = static_cast<int>(j);
  }
  return roots;
}

/// Seeds a fresh generator from cfg.rng_seed.
template <typename Scalar>
std::vector<Root<Scalar>> sample_roots(const Objective<Scalar>& obj, Scalar level, const RootFindConfig& cfg,
                                       const SamplingRegion<Scalar>& region = {}) {
  Rng rng(cfg.rng_seed);
  return sample_roots(obj, level, cfg, rng, region);
}

}  // namespace contour
