#include "contour/reproduce.hpp"

#include "contour/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace contour {

namespace {

struct Reference {
  PointD start;
  double first_level;
  double first_level_tol;  // reference heights are known to a limited number of decimals
};

Reference reference_for(std::string_view benchmark) {
  if (benchmark == "sphere_3") return {PointD::Ones(3), 3.0, 1e-9};
  if (benchmark == "mccormick") return {PointD::Constant(2, 2.0), 2.2431975047, 1e-9};
  if (benchmark == "ackley") return {PointD::Constant(2, 2.0), 6.59359908, 5e-9};
  throw UnknownBenchmark("no reference run for benchmark '" + std::string(benchmark) + "'");
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(10);
  ss << v;
  return ss.str();
}

ThresholdCheck check(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

void add_common_checks(const ObjectiveD& obj, const Reference& ref, const RunResultD& res, int oracle_resolution,
                       std::vector<ThresholdCheck>& out) {
  const bool has_records = !res.iterations.empty();
  const double first = has_records ? res.iterations.front().level : std::nan("");
  out.push_back(check("first contour level", has_records && std::abs(first - ref.first_level) <= ref.first_level_tol,
                      "L0 = " + fmt(first) + ", expected " + fmt(ref.first_level) + " +/- " + fmt(ref.first_level_tol)));

  out.push_back(check("terminated by convergence",
                      res.status == RunStatus::converged || res.status == RunStatus::contour_collapsed,
                      "status " + std::string(to_string(res.status))));

  int violations = 0;
  for (std::size_t i = 0; i < res.iterations.size(); ++i) {
    if (!(res.iterations[i].chosen_value < res.iterations[i].level)) ++violations;
    if (i > 0 && !(res.iterations[i].level < res.iterations[i - 1].level)) ++violations;
  }
  out.push_back(check("strict descent", violations == 0, std::to_string(violations) + " violation(s)"));

  try {
    const auto rep = contraction_report(res);
    const double ratio = rep.diameters.back() / rep.diameters.front();
    out.push_back(check("diameter trend contracts", rep.geometric_fit < 0, "slope " + fmt(rep.geometric_fit)));
    out.push_back(check("final diameter <= 1% of initial", ratio <= 0.01, "ratio " + fmt(ratio)));
  } catch (const InsufficientTrace& e) {
    out.push_back(check("diameter trend contracts", false, e.what()));
    out.push_back(check("final diameter <= 1% of initial", false, e.what()));
  }

  const auto grid = brute_force_min(obj, oracle_resolution);
  const double gap = std::abs(res.minimum_value - grid.value);
  out.push_back(check("grid oracle agreement", gap <= 1e-3,
                      "|f* - grid| = " + fmt(gap) + " (grid min " + fmt(grid.value) + ")"));
}

}  // namespace

bool Reproduction::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ThresholdCheck& c) { return c.passed; });
}

PointD reference_start(std::string_view benchmark) { return reference_for(benchmark).start; }

Reproduction reproduce_benchmark(std::string_view benchmark, const ReproduceOptions& options) {
  const Reference ref = reference_for(benchmark);
  const auto obj = make_benchmark<double>(benchmark);
  const auto& known = *obj.known_minimum();

  Reproduction rep;
  rep.config.objective_name = obj.name();
  rep.config.x0 = ref.start;
  rep.config.master_seed = options.seed;
  rep.result = optimize(obj, rep.config);
  const auto& res = rep.result;
  auto& checks = rep.checks;

  if (benchmark == "sphere_3") {
    const double norm = res.minimizer.norm();
    checks.push_back(check("|x*| <= 0.05", norm <= 0.05, "|x*| = " + fmt(norm)));
    const auto n = res.iterations.size();
    checks.push_back(check("at most 15 iterations", n <= 15, std::to_string(n) + " iteration(s)"));
  } else if (benchmark == "mccormick") {
    const double dist = (res.minimizer - known.point).norm();
    checks.push_back(check("minimizer within 1e-2", dist <= 1e-2, "distance " + fmt(dist)));
    const double gap = std::abs(res.minimum_value - known.value);
    checks.push_back(check("minimum value within 1e-3", gap <= 1e-3, "f* = " + fmt(res.minimum_value)));
  } else {
    checks.push_back(
        check("f(x*) <= 1e-3", res.minimum_value <= 1e-3, "f* = " + fmt(res.minimum_value)));
    Rng starts(derive_seed(options.seed, {0x5354415254ULL}));
    int failures = 0;
    double worst = 0;
    for (int s = 0; s < options.random_starts; ++s) {
      RunConfigD cfg = rep.config;
      cfg.x0 = PointD(2);
      for (Eigen::Index k = 0; k < 2; ++k) cfg.x0(k) = starts.uniform(obj.domain().lower()(k), obj.domain().upper()(k));
      cfg.master_seed = derive_seed(options.seed, {static_cast<std::uint64_t>(s)});
      const auto r = optimize(obj, cfg);
      worst = std::max(worst, r.minimum_value);
      if (!(r.minimum_value <= 1e-2)) ++failures;
    }
    checks.push_back(check(std::to_string(options.random_starts) + " random starts reach f <= 1e-2", failures == 0,
                           std::to_string(failures) + " failure(s), worst f* = " + fmt(worst)));
  }

  add_common_checks(obj, ref, res, options.oracle_resolution, checks);
  return rep;
}

}  // namespace contour
