#include "contour/trace.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace contour {

using nlohmann::json;

namespace {

json point_to_json(const PointD& p) {
  json a = json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) a.push_back(p(k));
  return a;
}

PointD point_from_json(const json& a) {
  if (!a.is_array()) throw TraceFormatError("expected an array of numbers");
  PointD p(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) p(static_cast<Eigen::Index>(k)) = a[k].get<double>();
  return p;
}

// JSON has no infinities; non-finite values travel as null.
json real_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real_from_json(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

json config_to_json(const RunConfigD& c) {
  return {
      {"objective", c.objective_name},
      {"x0", point_to_json(c.x0)},
      {"epsilon", c.epsilon},
      {"max_iterations", c.max_iterations},
      {"descent_retry_limit", c.descent_retry_limit},
      {"master_seed", c.master_seed},
      {"rootfind",
       {{"n_roots", c.rootfind.n_roots},
        {"root_tolerance", c.rootfind.root_tolerance},
        {"max_bracket_attempts", optional_to_json(c.rootfind.max_bracket_attempts)},
        {"dedup_radius", optional_to_json(c.rootfind.dedup_radius)},
        {"rng_seed", c.rootfind.rng_seed},
        {"bisection_max_iter", c.rootfind.bisection_max_iter}}},
      {"convexity",
       {{"n_segment_samples", c.convexity.n_segment_samples}, {"rng_seed", c.convexity.rng_seed}}},
  };
}

RunConfigD config_from_json(const json& j) {
  RunConfigD c;
  c.objective_name = j.at("objective").get<std::string>();
  c.x0 = point_from_json(j.at("x0"));
  c.epsilon = j.at("epsilon").get<double>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.descent_retry_limit = j.at("descent_retry_limit").get<int>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  const auto& rf = j.at("rootfind");
  c.rootfind.n_roots = rf.at("n_roots").get<int>();
  c.rootfind.root_tolerance = rf.at("root_tolerance").get<double>();
  c.rootfind.max_bracket_attempts = optional_from_json<int>(rf.at("max_bracket_attempts"));
  c.rootfind.dedup_radius = optional_from_json<double>(rf.at("dedup_radius"));
  c.rootfind.rng_seed = rf.at("rng_seed").get<std::uint64_t>();
  c.rootfind.bisection_max_iter = rf.at("bisection_max_iter").get<int>();
  const auto& cv = j.at("convexity");
  c.convexity.n_segment_samples = cv.at("n_segment_samples").get<int>();
  c.convexity.rng_seed = cv.at("rng_seed").get<std::uint64_t>();
  return c;
}

json record_to_json(const IterationRecordD& r) {
  json roots = json::array();
  for (const auto& q : r.roots)
    roots.push_back({{"point", point_to_json(q.point)},
                     {"residual", q.residual},
                     {"iterate_index", q.iterate_index},
                     {"root_index", q.root_index}});
  json averages = json::array();
  for (const auto& a : r.subset_averages)
    averages.push_back({{"point", point_to_json(a.point)}, {"value", a.value}, {"size", a.size}});
  return {
      {"index", r.index},
      {"level", r.level},
      {"iterate", point_to_json(r.iterate)},
      {"roots", std::move(roots)},
      {"partition", {{"subsets", r.partition.subsets}, {"parent", r.partition.parent}}},
      {"subset_averages", std::move(averages)},
      {"chosen", point_to_json(r.chosen)},
      {"chosen_value", r.chosen_value},
      {"retries", r.retries},
  };
}

IterationRecordD record_from_json(const json& j) {
  IterationRecordD r;
  r.index = j.at("index").get<int>();
  r.level = j.at("level").get<double>();
  r.iterate = point_from_json(j.at("iterate"));
  for (const auto& q : j.at("roots"))
    r.roots.push_back({point_from_json(q.at("point")), q.at("residual").get<double>(),
                       q.at("iterate_index").get<int>(), q.at("root_index").get<int>()});
  r.partition.subsets = j.at("partition").at("subsets").get<std::vector<std::vector<int>>>();
  r.partition.parent = j.at("partition").at("parent").get<std::vector<int>>();
  for (const auto& a : j.at("subset_averages"))
    r.subset_averages.push_back({point_from_json(a.at("point")), a.at("value").get<double>(), a.at("size").get<int>()});
  r.chosen = point_from_json(j.at("chosen"));
  r.chosen_value = j.at("chosen_value").get<double>();
  r.retries = j.at("retries").get<int>();
  return r;
}

json contraction_to_json(const ContractionReport& c) {
  json ratios = json::array();
  for (double q : c.ratios) ratios.push_back(real_to_json(q));
  return {
      {"diameter_source", "sampled root sets"},
      {"diameters", c.diameters},
      {"ratios", std::move(ratios)},
      {"max_ratio", real_to_json(c.max_ratio)},
      {"geometric_fit", c.geometric_fit},
  };
}

ContractionReport contraction_from_json(const json& j) {
  ContractionReport c;
  c.diameters = j.at("diameters").get<std::vector<double>>();
  for (const auto& q : j.at("ratios")) c.ratios.push_back(real_from_json(q));
  c.max_ratio = real_from_json(j.at("max_ratio"));
  c.geometric_fit = j.at("geometric_fit").get<double>();
  return c;
}

}  // namespace

TraceFile make_trace(const RunConfigD& config, const RunResultD& result) {
  TraceFile t;
  t.config = config;
  t.records = result.iterations;
  t.result = {result.minimizer, result.minimum_value, result.status, result.evaluations_used,
              static_cast<int>(result.iterations.size())};
  try {
    t.contraction = contraction_report(result);
  } catch (const InsufficientTrace&) {
    t.contraction.reset();
  }
  return t;
}

std::string serialize(const TraceFile& t) {
  json records = json::array();
  for (const auto& r : t.records) records.push_back(record_to_json(r));
  json doc = {
      {"schema_version", t.schema_version},
      {"config", config_to_json(t.config)},
      {"records", std::move(records)},
      {"result",
       {{"minimizer", point_to_json(t.result.minimizer)},
        {"minimum_value", t.result.minimum_value},
        {"status", std::string(to_string(t.result.status))},
        {"evaluations_used", t.result.evaluations_used},
        {"iteration_count", t.result.iteration_count}}},
      {"contraction", t.contraction ? contraction_to_json(*t.contraction) : json(nullptr)},
  };
  return doc.dump(1) + "\n";
}

TraceFile parse_trace(std::string_view text) {
  TraceFile t;
  try {
    const json doc = json::parse(text);
    t.schema_version = doc.at("schema_version").get<int>();
    if (t.schema_version != kTraceSchemaVersion)
      throw TraceFormatError("unsupported trace schema version " + std::to_string(t.schema_version));
    t.config = config_from_json(doc.at("config"));
    for (const auto& r : doc.at("records")) t.records.push_back(record_from_json(r));
    const auto& res = doc.at("result");
    t.result.minimizer = point_from_json(res.at("minimizer"));
    t.result.minimum_value = res.at("minimum_value").get<double>();
    t.result.status = parse_status(res.at("status").get<std::string>());
    t.result.evaluations_used = res.at("evaluations_used").get<std::uint64_t>();
    t.result.iteration_count = res.at("iteration_count").get<int>();
    if (!doc.at("contraction").is_null()) t.contraction = contraction_from_json(doc.at("contraction"));
  } catch (const json::exception& e) {
    throw TraceFormatError(std::string("malformed trace: ") + e.what());
  } catch (const ConfigurationError& e) {
    throw TraceFormatError(std::string("malformed trace: ") + e.what());
  }
  for (std::size_t i = 0; i < t.records.size(); ++i)
    if (t.records[i].index != static_cast<int>(i)) throw TraceFormatError("trace records out of order or with gaps");
  return t;
}

void write_trace(const std::string& path, const TraceFile& trace) {
  const std::string text = serialize(trace);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

TraceFile read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceFormatError("cannot open trace '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

}  // namespace contour
