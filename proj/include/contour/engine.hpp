#pragma once

#include "contour/core.hpp"
#include "contour/decompose.hpp"
#include "contour/levelset.hpp"
#include "contour/objective.hpp"
#include "contour/random.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace contour {

template <typename Scalar>
struct RunConfig {
  std::string objective_name;
  Point<Scalar> x0;
  double epsilon = 1e-6;
  int max_iterations = 100;
  // Seeds inside these two are overwritten per iterate from master_seed.
  RootFindConfig rootfind;
  ConvexityTestConfig convexity;
  int descent_retry_limit = 3;
  std::uint64_t master_seed = 0;

  bool operator==(const RunConfig&) const = default;
};

template <typename Scalar>
struct SubsetAverage {
  Point<Scalar> point;
  Scalar value = 0;
  int size = 0;

  bool operator==(const SubsetAverage&) const = default;
};

template <typename Scalar>
struct IterationRecord {
  int index = 0;
  Scalar level = 0;
  Point<Scalar> iterate;
  std::vector<Root<Scalar>> roots;
  Partition partition;
  std::vector<SubsetAverage<Scalar>> subset_averages;
  Point<Scalar> chosen;
  Scalar chosen_value = 0;
  int retries = 0;  // extra attempts spent before descent succeeded

  bool operator==(const IterationRecord&) const = default;
};

enum class RunStatus { converged, max_iterations_reached, contour_collapsed, descent_stalled };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iterations_reached: return "max_iterations_reached";
    case RunStatus::contour_collapsed: return "contour_collapsed";
    case RunStatus::descent_stalled: return "descent_stalled";
  }
  return "unknown";
}

inline RunStatus parse_status(std::string_view s) {
  for (auto st : {RunStatus::converged, RunStatus::max_iterations_reached, RunStatus::contour_collapsed,
                  RunStatus::descent_stalled})
    if (to_string(st) == s) return st;
  throw ConfigurationError("unknown run status '" + std::string(s) + "'");
}

template <typename Scalar>
struct RunResult {
  Point<Scalar> minimizer;
  Scalar minimum_value = 0;
  std::vector<IterationRecord<Scalar>> iterations;
  RunStatus status = RunStatus::max_iterations_reached;
  std::uint64_t evaluations_used = 0;

  bool operator==(const RunResult&) const = default;
};

using RunConfigD = RunConfig<double>;
using IterationRecordD = IterationRecord<double>;
using RunResultD = RunResult<double>;

template <typename Scalar>
void validate(const RunConfig<Scalar>& cfg, const Objective<Scalar>& obj) {
  if (!(cfg.epsilon > 0)) throw ConfigurationError("epsilon must be positive");
  if (cfg.max_iterations < 1) throw ConfigurationError("max_iterations must be at least 1");
  if (cfg.descent_retry_limit < 0) throw ConfigurationError("descent_retry_limit must be non-negative");
  if (cfg.x0.size() != obj.dim())
    throw ConfigurationError("x0 has " + std::to_string(cfg.x0.size()) + " components, objective '" + obj.name() +
                             "' expects " + std::to_string(obj.dim()));
  if (!obj.domain().contains(cfg.x0)) throw ConfigurationError("x0 lies outside the domain of '" + obj.name() + "'");
  cfg.rootfind.validate();
  cfg.convexity.validate();
}

/// Result of decomposing one root set and picking the update.
template <typename Scalar>
struct Update {
  Partition partition;
  std::vector<SubsetAverage<Scalar>> averages;
  std::size_t chosen = 0;  // index into averages
};

/// Averages each subset of `partition` and picks the lowest average.
/// Singleton subsets only compete when no larger subset exists, since a
/// singleton's average is the root itself and sits on the level.
template <typename Scalar>
Update<Scalar> choose_from(const Objective<Scalar>& obj, const std::vector<Root<Scalar>>& roots, Partition partition) {
  Update<Scalar> up;
  up.partition = std::move(partition);
  bool any_group = false;
  for (const auto& members : up.partition.subsets) {
    Point<Scalar> avg = subset_average(roots, members);
    const Scalar value = evaluate(obj, avg);
    up.averages.push_back({std::move(avg), value, static_cast<int>(members.size())});
    any_group = any_group || members.size() > 1;
  }
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (std::size_t z = 0; z < up.averages.size(); ++z) {
    const auto& a = up.averages[z];
    if (any_group && a.size < 2) continue;
    if (a.value < best) {
      best = a.value;
      up.chosen = z;
    }
  }
  return up;
}

/// Groups the roots by union-find and picks the lowest subset average.
template <typename Scalar>
Update<Scalar> choose_update(const Objective<Scalar>& obj, const std::vector<Root<Scalar>>& roots, Scalar level,
                             const ConvexityTestConfig& convexity) {
  return choose_from(obj, roots, group_roots(obj, roots, level, convexity));
}

// A singleton "average" is a root, below the level only by its residual.
template <typename Scalar>
bool descends(const Update<Scalar>& up, Scalar level) {
  const auto& pick = up.averages[up.chosen];
  return pick.size > 1 && pick.value < level;
}

/// Samples roots on the level through `x`. With the default dedup radius,
/// which scales with the sampling box, a box much larger than the contour
/// merges every root; a collapse is therefore only reported once it
/// persists in boxes around `x` halved down to a diagonal of `epsilon`.
template <typename Scalar>
std::vector<Root<Scalar>> sample_roots_confirmed(const Objective<Scalar>& obj, const Point<Scalar>& x, Scalar level,
                                                 const RootFindConfig& rootfind,
                                                 std::optional<BoxDomain<Scalar>> box, int index, Scalar epsilon) {
  for (;;) {
    try {
      return sample_roots(obj, level, rootfind, SamplingRegion<Scalar>{box, x, index});
    } catch (const InsufficientRoots&) {
      const BoxDomain<Scalar> current = box ? *box : obj.domain();
      if (rootfind.dedup_radius || current.diagonal() <= epsilon) throw;
      const Point<Scalar> half = current.extent() / 4;
      box.emplace((x - half).cwiseMax(obj.domain().lower()), (x + half).cwiseMin(obj.domain().upper()));
    }
  }
}

/// One contour-descent iteration from `x`.
///
/// Samples roots on f = f(x) inside `box`, decomposes them and moves to the
/// lowest subset average. A chain of passing pairs can bend around a
/// non-convex sublevel set, so when no average descends the subsets are
/// split into cliques and averaged again. If that fails too, the step is
/// retried on a fresh stream with twice the roots, up to
/// cfg.descent_retry_limit times, then DescentStalled is thrown.
/// InsufficientRoots propagates: the contour has collapsed.
template <typename Scalar>
IterationRecord<Scalar> step(const Objective<Scalar>& obj, const Point<Scalar>& x, const RunConfig<Scalar>& cfg,
                             int index, const std::optional<BoxDomain<Scalar>>& box = std::nullopt) {
  if (!obj.domain().contains(x)) throw DomainViolation("iterate outside the domain of '" + obj.name() + "'");
  const Scalar level = evaluate(obj, x);

  RootFindConfig rootfind = cfg.rootfind;
  Point<Scalar> best = x;
  Scalar best_value = std::numeric_limits<Scalar>::infinity();
  for (int attempt = 0; attempt <= cfg.descent_retry_limit; ++attempt) {
    const auto i = static_cast<std::uint64_t>(index);
    const auto a = static_cast<std::uint64_t>(attempt);
    rootfind.rng_seed = derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(Stream::roots), i, a});
    ConvexityTestConfig convexity = cfg.convexity;
    convexity.rng_seed = derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(Stream::pairs), i, a});

    auto roots = sample_roots_confirmed(obj, x, level, rootfind, box, index, static_cast<Scalar>(cfg.epsilon));
    auto up = choose_update(obj, roots, level, convexity);
    if (!descends(up, level)) {
      Partition cliques = split_into_cliques(obj, roots, level, convexity, up.partition);
      if (cliques != up.partition) {
        auto refined = choose_from(obj, roots, std::move(cliques));
        if (descends(refined, level)) up = std::move(refined);
      }
    }
    const auto& pick = up.averages[up.chosen];
    if (descends(up, level)) {
      IterationRecord<Scalar> rec;
      rec.index = index;
      rec.level = level;
      rec.iterate = x;
      rec.chosen = pick.point;
      rec.chosen_value = pick.value;
      rec.roots = std::move(roots);
      rec.partition = std::move(up.partition);
      rec.subset_averages = std::move(up.averages);
      rec.retries = attempt;
      return rec;
    }
    if (pick.value < best_value) {
      best = pick.point;
      best_value = pick.value;
    }
    rootfind.n_roots *= 2;
  }
  throw DescentStalled<Scalar>("no subset average fell below the level after " +
                                   std::to_string(cfg.descent_retry_limit) + " retries",
                               best, best_value);
}

/// Sampling box for the next iterate: the bounding box of this iterate's
/// roots and update, widened on every side by a quarter of its longest
/// extent and clipped to the domain. The next sublevel set is nested in
/// this one.
template <typename Scalar>
BoxDomain<Scalar> next_sampling_box(const Objective<Scalar>& obj, const IterationRecord<Scalar>& rec) {
  Point<Scalar> lo = rec.chosen, hi = rec.chosen;
  for (const auto& r : rec.roots) {
    lo = lo.cwiseMin(r.point);
    hi = hi.cwiseMax(r.point);
  }
  const auto& domain = obj.domain();
  const Point<Scalar> floor = (domain.extent() * (64 * std::numeric_limits<Scalar>::epsilon()));
  const Point<Scalar> margin = Point<Scalar>::Constant(lo.size(), (hi - lo).maxCoeff() / 4).cwiseMax(floor);
  return BoxDomain<Scalar>((lo - margin).cwiseMax(domain.lower()), (hi + margin).cwiseMin(domain.upper()));
}

/// Iterates step() from cfg.x0 until the update moves less than epsilon,
/// the contour collapses, descent stalls, or the iteration cap is hit.
template <typename Scalar>
RunResult<Scalar> optimize(const Objective<Scalar>& obj, const RunConfig<Scalar>& cfg) {
  validate(cfg, obj);
  const std::uint64_t start = obj.evaluations();

  RunResult<Scalar> result;
  Point<Scalar> x = cfg.x0;
  Scalar value = evaluate(obj, x);
  std::optional<BoxDomain<Scalar>> box;
  result.status = RunStatus::max_iterations_reached;

  for (int i = 0; i < cfg.max_iterations; ++i) {
    IterationRecord<Scalar> rec;
    try {
      rec = step(obj, x, cfg, i, box);
    } catch (const InsufficientRoots&) {
      result.status = RunStatus::contour_collapsed;
      break;
    } catch (const DescentStalled<Scalar>&) {
      result.status = RunStatus::descent_stalled;
      break;
    }
    const Scalar moved = (rec.chosen - x).norm();
    x = rec.chosen;
    value = rec.chosen_value;
    box = next_sampling_box(obj, rec);
    result.iterations.push_back(std::move(rec));
    if (moved < static_cast<Scalar>(cfg.epsilon)) {
      result.status = RunStatus::converged;
      break;
    }
  }

  result.minimizer = x;
  result.minimum_value = value;
  result.evaluations_used = obj.evaluations() - start;
  return result;
}

}  // namespace contour
