#include "contour/trace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace contour;

namespace {

TraceFile ackley_trace(std::uint64_t seed) {
  const auto obj = make_benchmark<double>("ackley");
  RunConfigD cfg;
  cfg.objective_name = obj.name();
  cfg.x0 = PointD::Constant(2, 2.0);
  cfg.master_seed = seed;
  cfg.rootfind.dedup_radius = 1e-3;
  cfg.rootfind.n_roots = 12;
  return make_trace(cfg, optimize(obj, cfg));
}

}  // namespace

TEST(Trace, RoundTripIsLosslessAndByteStable) {
  const TraceFile t = ackley_trace(3);
  ASSERT_FALSE(t.records.empty());
  ASSERT_TRUE(t.contraction.has_value());
  const std::string text = serialize(t);
  const TraceFile back = parse_trace(text);
  EXPECT_EQ(back, t);
  EXPECT_EQ(serialize(back), text);
}

TEST(Trace, RoundTripPropertyOverSeeds) {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const TraceFile t = ackley_trace(seed);
    ASSERT_EQ(parse_trace(serialize(t)), t) << "seed " << seed;
  }
}

TEST(Trace, SummaryMatchesResult) {
  const TraceFile t = ackley_trace(1);
  EXPECT_EQ(t.schema_version, 1);
  EXPECT_EQ(t.result.iteration_count, static_cast<int>(t.records.size()));
  EXPECT_EQ(t.config.objective_name, "ackley");
  EXPECT_EQ(t.config.rootfind.dedup_radius, 1e-3);
  EXPECT_FALSE(t.config.rootfind.max_bracket_attempts.has_value());
}

TEST(Trace, OptionalFieldsAndInfinitiesSurvive) {
  TraceFile t;
  t.config.objective_name = "sphere_2";
  t.config.x0 = PointD::Zero(2);
  t.result.minimizer = PointD::Zero(2);
  t.result.status = RunStatus::contour_collapsed;
  EXPECT_EQ(parse_trace(serialize(t)), t);

  t.contraction = contraction_report(std::vector<double>{0.0, 1.0});
  ASSERT_TRUE(std::isinf(t.contraction->ratios[0]));
  EXPECT_EQ(parse_trace(serialize(t)), t);
}

TEST(Trace, RejectsMalformedDocuments) {
  EXPECT_THROW(parse_trace("not json"), TraceFormatError);
  EXPECT_THROW(parse_trace("{}"), TraceFormatError);

  const std::string good = serialize(ackley_trace(2));
  std::string bad_version = good;
  bad_version.replace(bad_version.find("\"schema_version\": 1"), 19, "\"schema_version\": 2");
  EXPECT_THROW(parse_trace(bad_version), TraceFormatError);

  std::string bad_status = good;
  const auto pos = bad_status.find("\"status\": \"");
  bad_status.insert(pos + 11, "x");
  EXPECT_THROW(parse_trace(bad_status), TraceFormatError);
}

TEST(Trace, RejectsGapsInRecords) {
  TraceFile t = ackley_trace(4);
  ASSERT_GE(t.records.size(), 2u);
  t.records.erase(t.records.begin());
  EXPECT_THROW(parse_trace(serialize(t)), TraceFormatError);
}

TEST(Trace, ReadMissingFile) { EXPECT_THROW(read_trace("/nonexistent/trace.json"), TraceFormatError); }
