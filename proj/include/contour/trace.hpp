#pragma once

#include "contour/analysis.hpp"
#include "contour/engine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace contour {

/// Malformed or unreadable trace document.
class TraceFormatError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kTraceSchemaVersion = 1;

struct RunSummary {
  PointD minimizer;
  double minimum_value = 0;
  RunStatus status = RunStatus::max_iterations_reached;
  std::uint64_t evaluations_used = 0;
  int iteration_count = 0;

  bool operator==(const RunSummary&) const = default;
};

/// Everything a run leaves behind: the configuration echo, one record per
/// accepted iterate, the outcome, and the contraction report (absent when the
/// run was too short to compute one).
struct TraceFile {
  int schema_version = kTraceSchemaVersion;
  RunConfigD config;
  std::vector<IterationRecordD> records;
  RunSummary result;
  std::optional<ContractionReport> contraction;

  bool operator==(const TraceFile&) const = default;
};

TraceFile make_trace(const RunConfigD& config, const RunResultD& result);

std::string serialize(const TraceFile& trace);
TraceFile parse_trace(std::string_view text);

void write_trace(const std::string& path, const TraceFile& trace);
TraceFile read_trace(const std::string& path);

}  // namespace contour
