#pragma once

#include "contour/engine.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace contour {

struct ThresholdCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproduceOptions {
  std::uint64_t seed = 7;
  int random_starts = 20;       // ackley only
  int oracle_resolution = 1001; // grid nodes per axis for the brute-force check
};

struct Reproduction {
  RunConfigD config;
  RunResultD result;
  std::vector<ThresholdCheck> checks;

  bool passed() const;
};

/// Reference starting point of a reproducible benchmark run.
/// Throws UnknownBenchmark outside sphere_3, mccormick, ackley.
PointD reference_start(std::string_view benchmark);

/// Runs the reference configuration for `benchmark` and evaluates every
/// threshold that applies to it.
Reproduction reproduce_benchmark(std::string_view benchmark, const ReproduceOptions& options = {});

}  // namespace contour
