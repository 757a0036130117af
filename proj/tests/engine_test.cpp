#include "contour/engine.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace contour;

namespace {

PointD pt(std::initializer_list<double> v) {
  PointD p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) p(k++) = x;
  return p;
}

RunConfigD config_for(const ObjectiveD& obj, PointD x0, std::uint64_t seed = 7) {
  RunConfigD cfg;
  cfg.objective_name = obj.name();
  cfg.x0 = std::move(x0);
  cfg.master_seed = seed;
  return cfg;
}

void expect_strict_descent(const RunResultD& r) {
  for (std::size_t i = 0; i < r.iterations.size(); ++i) {
    const auto& rec = r.iterations[i];
    EXPECT_EQ(rec.index, static_cast<int>(i));
    EXPECT_LT(rec.chosen_value, rec.level);
    if (i > 0) {
      EXPECT_LT(rec.level, r.iterations[i - 1].level);
      EXPECT_EQ(rec.iterate, r.iterations[i - 1].chosen);
      EXPECT_EQ(rec.level, r.iterations[i - 1].chosen_value);
    }
  }
}

// Concave bowl: every chord between contour points runs through the higher
// interior, so no subset ever has more than one root.
ObjectiveD dome() {
  return ObjectiveD("dome", BoxDomainD::cube(2, -1, 1), [](const PointD& x) { return -x.squaredNorm(); });
}

// Thin ring 0.9 < |x| < 1.1 below the level 0.01: chains of short chords
// join the whole ring, though its centre sits far above the level.
ObjectiveD ring() {
  return ObjectiveD("ring", BoxDomainD::cube(2, -2, 2), [](const PointD& x) {
    const double d = x.norm() - 1;
    return d * d;
  });
}

}  // namespace

TEST(Step, SphereFromReferenceStart) {
  const auto obj = make_benchmark<double>("sphere_3");
  const auto rec = step(obj, pt({1, 1, 1}), config_for(obj, pt({1, 1, 1})), 0);
  EXPECT_NEAR(rec.level, 3.0, 1e-12);
  EXPECT_LT(rec.chosen_value, 3.0);
  EXPECT_EQ(rec.chosen_value, obj.raw(rec.chosen));
}

TEST(Step, McCormickFromReferenceStart) {
  const auto obj = make_benchmark<double>("mccormick");
  const auto rec = step(obj, pt({2, 2}), config_for(obj, pt({2, 2})), 0);
  EXPECT_NEAR(rec.level, 2.2431975047, 1e-9);
  EXPECT_LT(rec.chosen_value, rec.level);
}

TEST(Step, ChosenIsLowestNonSingletonAverage) {
  const auto obj = make_benchmark<double>("ackley");
  const auto rec = step(obj, pt({2, 2}), config_for(obj, pt({2, 2}), 3), 0);
  ASSERT_EQ(rec.partition.subsets.size(), rec.subset_averages.size());
  bool any_group = false;
  for (const auto& a : rec.subset_averages) any_group = any_group || a.size > 1;
  for (const auto& a : rec.subset_averages) {
    EXPECT_EQ(a.value, obj.raw(a.point));
    if (!any_group || a.size > 1) EXPECT_LE(rec.chosen_value, a.value);
  }
}

TEST(ChooseUpdate, SymmetricPairLandsOnMinimum) {
  const auto obj = make_benchmark<double>("sphere_1");
  const double s3 = std::sqrt(3.0);
  const std::vector<Root<double>> roots{{pt({-s3}), obj.raw(pt({-s3})) - 3.0, 0, 0},
                                        {pt({s3}), obj.raw(pt({s3})) - 3.0, 0, 1}};
  const auto up = choose_update(obj, roots, 3.0, ConvexityTestConfig{});
  ASSERT_EQ(up.averages.size(), 1u);
  EXPECT_EQ(up.averages[up.chosen].point, pt({0}));
  EXPECT_EQ(up.averages[up.chosen].value, 0.0);
}

TEST(Step, DescentStallsOnConcaveObjective) {
  const auto obj = dome();
  auto cfg = config_for(obj, pt({0.5, 0}));
  cfg.rootfind.n_roots = 6;
  try {
    step(obj, cfg.x0, cfg, 0);
    FAIL() << "expected DescentStalled";
  } catch (const DescentStalled<double>& e) {
    // Only singletons appear, each within the root tolerance of the level.
    EXPECT_GE(e.best_value(), -0.25 - cfg.rootfind.root_tolerance);
  }
  cfg.descent_retry_limit = 0;
  EXPECT_EQ(optimize(obj, cfg).status, RunStatus::descent_stalled);
}

TEST(Optimize, McCormickReachesGlobalMinimum) {
  const auto obj = make_benchmark<double>("mccormick");
  const auto r = optimize(obj, config_for(obj, pt({2, 2})));
  EXPECT_LE((r.minimizer - pt({-0.54719, -1.54719})).norm(), 1e-2);
  EXPECT_LE(std::abs(r.minimum_value - -1.9133), 1e-3);
  expect_strict_descent(r);
}

TEST(Optimize, AckleyReachesGlobalMinimum) {
  const auto obj = make_benchmark<double>("ackley");
  const auto r = optimize(obj, config_for(obj, pt({2, 2})));
  EXPECT_LE(r.minimum_value, 1e-3);
  expect_strict_descent(r);
}

TEST(Optimize, SphereReachesGlobalMinimum) {
  const auto obj = make_benchmark<double>("sphere_3");
  const auto r = optimize(obj, config_for(obj, pt({1, 1, 1})));
  EXPECT_LE(r.minimizer.norm(), 0.05);
  EXPECT_EQ(r.minimum_value, obj.raw(r.minimizer));
  EXPECT_GT(r.evaluations_used, 0u);
  expect_strict_descent(r);
}

TEST(Optimize, ConvergedMeansSmallLastStep) {
  for (const char* name : {"sphere_2", "mccormick", "ackley"}) {
    const auto obj = make_benchmark<double>(name);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto cfg = config_for(obj, (obj.domain().lower() + obj.domain().upper()) / 3, seed);
      const auto r = optimize(obj, cfg);
      if (r.status != RunStatus::converged) continue;
      const auto& last = r.iterations.back();
      EXPECT_LT((last.chosen - last.iterate).norm(), cfg.epsilon);
      EXPECT_EQ(r.minimizer, last.chosen);
    }
  }
}

TEST(Optimize, FixedPointConsistency) {
  for (const char* name : {"sphere_3", "mccormick", "ackley"}) {
    const auto obj = make_benchmark<double>(name);
    auto cfg = config_for(obj, obj.domain().lower() * 0.3 + obj.domain().upper() * 0.5);
    const auto r = optimize(obj, cfg);
    ASSERT_TRUE(r.status == RunStatus::converged || r.status == RunStatus::contour_collapsed) << name;
    try {
      const auto rec = step(obj, r.minimizer, cfg, 1000);
      EXPECT_LT((rec.chosen - r.minimizer).norm(), cfg.epsilon) << name;
    } catch (const InsufficientRoots&) {
      SUCCEED();
    }
  }
}

TEST(Optimize, AckleyRobustToStartingPoint) {
  const auto obj = make_benchmark<double>("ackley");
  Rng rng(2024);
  for (int s = 0; s < 20; ++s) {
    const PointD x0 = pt({rng.uniform(-5, 5), rng.uniform(-5, 5)});
    const auto r = optimize(obj, config_for(obj, x0, static_cast<std::uint64_t>(s)));
    EXPECT_LE(r.minimum_value, 1e-2) << "start " << x0.transpose();
    expect_strict_descent(r);
  }
}

TEST(Optimize, DeterministicForSeed) {
  const auto obj = make_benchmark<double>("ackley");
  const auto cfg = config_for(obj, pt({2, 2}), 99);
  const auto a = optimize(obj, cfg);
  const auto b = optimize(obj, cfg);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.iterations.front().roots, optimize(obj, config_for(obj, pt({2, 2}), 100)).iterations.front().roots);
}

TEST(Optimize, LevelsStayAboveGlobalMinimum) {
  // Minimum value from an independent derivative-based solve of McCormick.
  const double mccormick_min = -1.9132229549810362;
  const auto obj = make_benchmark<double>("mccormick");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = optimize(obj, config_for(obj, pt({2, 2}), seed));
    for (const auto& rec : r.iterations) EXPECT_GT(rec.level, mccormick_min);
    EXPECT_GE(r.minimum_value, mccormick_min - 1e-12);
  }
}

TEST(Optimize, IterationCap) {
  const auto obj = make_benchmark<double>("sphere_3");
  auto cfg = config_for(obj, pt({1, 1, 1}));
  cfg.max_iterations = 2;
  const auto r = optimize(obj, cfg);
  EXPECT_EQ(r.status, RunStatus::max_iterations_reached);
  EXPECT_EQ(r.iterations.size(), 2u);
  EXPECT_EQ(r.minimizer, r.iterations.back().chosen);
}

TEST(Optimize, StartAtMinimumCollapsesImmediately) {
  const auto obj = make_benchmark<double>("sphere_2");
  const auto r = optimize(obj, config_for(obj, pt({0, 0})));
  EXPECT_EQ(r.status, RunStatus::contour_collapsed);
  EXPECT_TRUE(r.iterations.empty());
  EXPECT_EQ(r.minimizer, pt({0, 0}));
  EXPECT_EQ(r.minimum_value, 0.0);
}

TEST(Optimize, RejectsInvalidConfig) {
  const auto obj = make_benchmark<double>("ackley");
  auto cfg = config_for(obj, pt({2, 2}));
  const auto before = obj.evaluations();

  auto bad = cfg;
  bad.epsilon = 0;
  EXPECT_THROW(optimize(obj, bad), ConfigurationError);
  bad = cfg;
  bad.max_iterations = 0;
  EXPECT_THROW(optimize(obj, bad), ConfigurationError);
  bad = cfg;
  bad.x0 = pt({100, 100});
  EXPECT_THROW(optimize(obj, bad), ConfigurationError);
  bad = cfg;
  bad.x0 = pt({1, 1, 1});
  EXPECT_THROW(optimize(obj, bad), ConfigurationError);
  bad = cfg;
  bad.rootfind.n_roots = 1;
  EXPECT_THROW(optimize(obj, bad), ConfigurationError);
  bad = cfg;
  bad.convexity.n_segment_samples = 0;
  EXPECT_THROW(optimize(obj, bad), ConfigurationError);
  bad = cfg;
  bad.descent_retry_limit = -1;
  EXPECT_THROW(optimize(obj, bad), ConfigurationError);

  EXPECT_EQ(obj.evaluations(), before);
}

TEST(NextSamplingBox, CoversRootsAndUpdate) {
  const auto obj = make_benchmark<double>("ackley");
  const auto rec = step(obj, pt({2, 2}), config_for(obj, pt({2, 2})), 0);
  const auto box = next_sampling_box(obj, rec);
  EXPECT_TRUE(box.contains(rec.chosen));
  for (const auto& r : rec.roots) EXPECT_TRUE(box.contains(r.point));
  EXPECT_TRUE(obj.domain().contains(box.lower()));
  EXPECT_TRUE(obj.domain().contains(box.upper()));
}

TEST(NextSamplingBox, FlatRootSetKeepsRoomAcross) {
  const auto obj = make_benchmark<double>("sphere_2");
  IterationRecordD rec;
  rec.chosen = pt({0, 1});
  rec.roots = {{pt({-1, 1}), 0, 0, 0}, {pt({1, 1}), 0, 0, 1}};
  const auto box = next_sampling_box(obj, rec);
  EXPECT_DOUBLE_EQ(box.lower()(0), -1.5);
  EXPECT_DOUBLE_EQ(box.upper()(0), 1.5);
  EXPECT_DOUBLE_EQ(box.lower()(1), 0.5);
  EXPECT_DOUBLE_EQ(box.upper()(1), 1.5);
}

TEST(Step, RingDescendsThroughCliques) {
  const auto obj = ring();
  const PointD x0 = pt({1.1, 0});
  auto cfg = config_for(obj, x0);
  const auto rec = step(obj, x0, cfg, 0);
  EXPECT_LT(rec.chosen_value, rec.level);
  EXPECT_LT(rec.chosen_value, 0.01);

  // Union-find alone joins the ring and its average misses the sublevel set.
  ConvexityTestConfig convexity = cfg.convexity;
  convexity.rng_seed = derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(Stream::pairs), 0, 0});
  const auto chained = choose_update(obj, rec.roots, rec.level, convexity);
  EXPECT_GE(chained.averages[chained.chosen].value, rec.level);
  EXPECT_NE(chained.partition, rec.partition);
}

TEST(Step, CollapseConfirmedInSmallerBoxes) {
  // The contour has diameter 2e-4; the default dedup radius over the whole
  // box is 1.4e-2, so only a shrunken box can separate roots.
  const auto obj = make_benchmark<double>("sphere_2");
  const PointD x = pt({1e-4, 0});
  auto cfg = config_for(obj, x);
  const auto rec = step(obj, x, cfg, 0, std::optional<BoxDomainD>(obj.domain()));
  EXPECT_GE(rec.roots.size(), 2u);
  EXPECT_LT(rec.chosen_value, rec.level);

  cfg.rootfind.dedup_radius = 1e-3 * obj.domain().diagonal();
  EXPECT_THROW(step(obj, x, cfg, 0, std::optional<BoxDomainD>(obj.domain())), InsufficientRoots);
}
