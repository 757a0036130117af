#pragma once

#include "contour/core.hpp"
#include "contour/levelset.hpp"
#include "contour/objective.hpp"
#include "contour/random.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace contour {

struct ConvexityTestConfig {
  int n_segment_samples = 20;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (n_segment_samples < 1) throw ConfigurationError("n_segment_samples must be at least 1");
  }

  bool operator==(const ConvexityTestConfig&) const = default;
};

/// Grouping of root indices into locally convex subsets.
///
/// `parent[j]` is the representative of root j, always the smallest index in
/// its subset. Subsets are sorted and listed by representative.
struct Partition {
  std::vector<std::vector<int>> subsets;
  std::vector<int> parent;

  bool operator==(const Partition&) const = default;
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int j) {
    while (parent_[j] != j) {
      parent_[j] = parent_[parent_[j]];
      j = parent_[j];
    }
    return j;
  }

  // The smaller representative wins, so the result is independent of merge order.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

  Partition to_partition() {
    Partition out;
    const int n = static_cast<int>(parent_.size());
    out.parent.resize(parent_.size());
    std::vector<int> slot(parent_.size(), -1);
    for (int j = 0; j < n; ++j) {
      const int r = find(j);
      out.parent[j] = r;
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(out.subsets.size());
        out.subsets.emplace_back();
      }
      out.subsets[slot[r]].push_back(j);
    }
    return out;
  }

 private:
  std::vector<int> parent_;
};

/// Randomized segment test: N interior points of the chord p-q must all lie
/// strictly below the level. Endpoints are ordered canonically first, so
/// swapping p and q under the same generator gives the same answer.
template <typename Scalar>
bool same_convex_subset(const Objective<Scalar>& obj, const Root<Scalar>& p, const Root<Scalar>& q, Scalar level,
                        const ConvexityTestConfig& cfg, Rng& rng) {
  cfg.validate();
  if (p.point == q.point) return true;
  const bool swap = q.root_index < p.root_index ||
                    (q.root_index == p.root_index &&
                     std::lexicographical_compare(q.point.begin(), q.point.end(), p.point.begin(), p.point.end()));
  const Point<Scalar>& from = swap ? q.point : p.point;
  const Point<Scalar>& to = swap ? p.point : q.point;
  for (int k = 0; k < cfg.n_segment_samples; ++k) {
    const auto lambda = static_cast<Scalar>(rng.uniform_open());
    const Point<Scalar> x = obj.domain().clamp(lambda * from + (1 - lambda) * to);
    if (evaluate(obj, x) >= level) return false;
  }
  return true;
}

/// Generator for the pair (j, k), independent of argument order.
inline Rng pair_stream(std::uint64_t seed, int iterate_index, int j, int k) {
  const auto lo = static_cast<std::uint64_t>(std::min(j, k));
  const auto hi = static_cast<std::uint64_t>(std::max(j, k));
  return Rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::pairs), static_cast<std::uint64_t>(iterate_index),
                                lo, hi}));
}

/// Tests every unordered pair and merges passing pairs by union-find.
/// Pair generators come from (cfg.rng_seed, iterate index, j, k).
template <typename Scalar>
Partition group_roots(const Objective<Scalar>& obj, std::span<const Root<Scalar>> roots, Scalar level,
                      const ConvexityTestConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(roots.size());
  DisjointSet sets(roots.size());
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      // Already joined through a third root; the test cannot split them.
      if (sets.find(j) == sets.find(k)) continue;
      Rng rng = pair_stream(cfg.rng_seed, roots[j].iterate_index, roots[j].root_index, roots[k].root_index);
      if (same_convex_subset(obj, roots[j], roots[k], level, cfg, rng)) sets.unite(j, k);
    }
  }
  return sets.to_partition();
}

template <typename Scalar>
Partition group_roots(const Objective<Scalar>& obj, const std::vector<Root<Scalar>>& roots, Scalar level,
                      const ConvexityTestConfig& cfg) {
  return group_roots(obj, std::span<const Root<Scalar>>(roots), level, cfg);
}

/// Splits every subset of `part` into cliques: groups in which each pair
/// passes the segment test, not just a chain of pairs. Roots join the first
/// clique (in index order) that accepts them. Pair generators match
/// group_roots, so a pair tested there gives the same verdict here.
template <typename Scalar>
Partition split_into_cliques(const Objective<Scalar>& obj, const std::vector<Root<Scalar>>& roots, Scalar level,
                             const ConvexityTestConfig& cfg, const Partition& part) {
  cfg.validate();
  Partition out;
  out.parent.assign(roots.size(), 0);
  for (const auto& members : part.subsets) {
    std::vector<std::vector<int>> cliques;
    for (int j : members) {
      auto fits = [&](const std::vector<int>& clique) {
        return std::all_of(clique.begin(), clique.end(), [&](int k) {
          Rng rng = pair_stream(cfg.rng_seed, roots[j].iterate_index, roots[k].root_index, roots[j].root_index);
          return same_convex_subset(obj, roots[k], roots[j], level, cfg, rng);
        });
      };
      auto home = std::find_if(cliques.begin(), cliques.end(), fits);
      if (home == cliques.end())
        cliques.push_back({j});
      else
        home->push_back(j);
    }
    for (auto& c : cliques) out.subsets.push_back(std::move(c));
  }
  std::sort(out.subsets.begin(), out.subsets.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) { return a.front() < b.front(); });
  for (const auto& s : out.subsets)
    for (int j : s) out.parent[j] = s.front();
  return out;
}

/// Arithmetic mean of the roots' points.
template <typename Scalar>
Point<Scalar> subset_average(std::span<const Root<Scalar>> roots) {
  if (roots.empty()) throw EmptySubset("cannot average an empty subset");
  Point<Scalar> sum = Point<Scalar>::Zero(roots.front().point.size());
  for (const auto& r : roots) sum += r.point;
  return sum / static_cast<Scalar>(roots.size());
}

template <typename Scalar>
Point<Scalar> subset_average(const std::vector<Root<Scalar>>& roots) {
  return subset_average(std::span<const Root<Scalar>>(roots));
}

/// Mean over the roots named by `members`.
template <typename Scalar>
Point<Scalar> subset_average(const std::vector<Root<Scalar>>& roots, const std::vector<int>& members) {
  if (members.empty()) throw EmptySubset("cannot average an empty subset");
  Point<Scalar> sum = Point<Scalar>::Zero(roots.front().point.size());
  for (int j : members) sum += roots[j].point;
  return sum / static_cast<Scalar>(members.size());
}

}  // namespace contour
