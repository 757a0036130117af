#include "contour/cli.hpp"

#include "contour/objective.hpp"
#include "contour/reproduce.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace contour {

namespace {

PointD parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigurationError("cannot parse '" + item + "' as a real number in '" + text + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ConfigurationError("cannot parse '" + item + "' as a real number in '" + text + "'");
    values.push_back(v);
  }
  if (values.empty()) throw ConfigurationError("empty point '" + text + "'");
  return Eigen::Map<const PointD>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat `key = value` file; '#' starts a comment. Keys are flag names
// without the leading dashes.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    kv[key] = value;
  }
  return kv;
}

struct RunFlags {
  std::string benchmark;
  std::string x0;
  std::uint64_t seed = 0;
  double epsilon = RunConfigD{}.epsilon;
  int n_roots = RootFindConfig{}.n_roots;
  int segment_samples = ConvexityTestConfig{}.n_segment_samples;
  int max_iter = RunConfigD{}.max_iterations;
  std::string out = "trace.json";
  std::string config;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--benchmark", f.benchmark, "sphere_<d>, mccormick or ackley");
  cmd->add_option("--x0", f.x0, "initial point, comma-separated");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--epsilon", f.epsilon, "convergence tolerance on the update step");
  cmd->add_option("--n-roots", f.n_roots, "roots sampled per contour");
  cmd->add_option("--segment-samples", f.segment_samples, "samples per segment in the convexity test");
  cmd->add_option("--max-iter", f.max_iter, "iteration cap");
  cmd->add_option("--out", f.out, "trace file path");
  cmd->add_option("--config", f.config, "flat key = value file; command-line flags take precedence");
}

// Fills every flag the command line left unset from the config file.
void apply_config_file(CLI::App* cmd, RunFlags& f) {
  if (f.config.empty()) return;
  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"benchmark", [&](const std::string& v) { f.benchmark = v; }},
      {"x0", [&](const std::string& v) { f.x0 = v; }},
      {"seed", [&](const std::string& v) { f.seed = std::stoull(v); }},
      {"epsilon", [&](const std::string& v) { f.epsilon = std::stod(v); }},
      {"n-roots", [&](const std::string& v) { f.n_roots = std::stoi(v); }},
      {"segment-samples", [&](const std::string& v) { f.segment_samples = std::stoi(v); }},
      {"max-iter", [&](const std::string& v) { f.max_iter = std::stoi(v); }},
      {"out", [&](const std::string& v) { f.out = v; }},
  };
  for (const auto& [key, value] : read_config_file(f.config)) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigurationError("unknown config key '" + key + "'");
    if (cmd->count("--" + key) > 0) continue;
    try {
      it->second(value);
    } catch (const std::logic_error&) {
      throw ConfigurationError("bad value '" + value + "' for config key '" + key + "'");
    }
  }
}

RunConfigD build_config(const RunFlags& f, const ObjectiveD& obj) {
  RunConfigD cfg;
  cfg.objective_name = obj.name();
  if (!f.x0.empty()) {
    cfg.x0 = parse_point(f.x0);
  } else {
    try {
      cfg.x0 = reference_start(obj.name());
    } catch (const UnknownBenchmark&) {
      cfg.x0 = (obj.domain().lower() + obj.domain().upper()) / 2;
    }
  }
  cfg.master_seed = f.seed;
  cfg.epsilon = f.epsilon;
  cfg.max_iterations = f.max_iter;
  cfg.rootfind.n_roots = f.n_roots;
  cfg.convexity.n_segment_samples = f.segment_samples;
  validate(cfg, obj);
  return cfg;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header(Eigen::Index dim) {
  std::string h;
  for (Eigen::Index k = 0; k < dim; ++k) h += "x" + std::to_string(k) + ",";
  return h + "height\n";
}

std::string csv_row(const PointD& p, double height) {
  std::string row;
  for (Eigen::Index k = 0; k < p.size(); ++k) row += csv_number(p(k)) + ",";
  return row + csv_number(height) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
}

int cmd_run(CLI::App* cmd, RunFlags& f, std::ostream& out) {
  apply_config_file(cmd, f);
  if (f.benchmark.empty()) throw ConfigurationError("--benchmark is required");
  const auto obj = make_benchmark<double>(f.benchmark);
  const RunConfigD cfg = build_config(f, obj);
  const auto result = optimize(obj, cfg);
  const TraceFile trace = make_trace(cfg, result);
  write_trace(f.out, trace);
  print_summary(out, trace);
  return exit_code_for(result.status);
}

int cmd_reproduce(const std::string& benchmark, std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  ReproduceOptions opts;
  opts.seed = seed;
  const auto rep = reproduce_benchmark(benchmark, opts);
  const TraceFile trace = make_trace(rep.config, rep.result);
  if (!out_path.empty()) write_trace(out_path, trace);
  print_summary(out, trace);
  out << "\n";
  for (const auto& c : rep.checks) out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
  out << (rep.passed() ? "all thresholds passed\n" : "some thresholds failed\n");
  return rep.passed() ? kExitOk : kExitUsage;
}

int cmd_plotdata(const std::string& trace_path, const std::string& out_dir, std::ostream& out) {
  const TraceFile trace = read_trace(trace_path);
  if (trace.records.empty()) throw TraceFormatError("trace '" + trace_path + "' has no records");
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const Eigen::Index dim = trace.records.front().iterate.size();

  std::string path_csv = csv_header(dim);
  for (const auto& rec : trace.records) {
    std::string roots_csv = csv_header(dim);
    for (const auto& r : rec.roots) roots_csv += csv_row(r.point, rec.level + r.residual);
    char name[32];
    std::snprintf(name, sizeof name, "roots_%03d.csv", rec.index);
    write_text(dir / name, roots_csv);
    path_csv += csv_row(rec.iterate, rec.level);
  }
  const auto& last = trace.records.back();
  path_csv += csv_row(last.chosen, last.chosen_value);
  write_text(dir / "path.csv", path_csv);
  out << "wrote " << trace.records.size() << " root file(s) and path.csv to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(RunStatus status) {
  switch (status) {
    case RunStatus::converged:
    case RunStatus::contour_collapsed: return kExitOk;
    case RunStatus::descent_stalled: return kExitStalled;
    case RunStatus::max_iterations_reached: return kExitMaxIterations;
  }
  return kExitUsage;
}

void print_summary(std::ostream& out, const TraceFile& trace) {
  auto point = [](const PointD& p) {
    std::string s = "(";
    char buf[40];
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.10f", k ? ", " : "", p(k));
      s += buf;
    }
    return s + ")";
  };
  char buf[64];
  out << trace.config.objective_name << "\n";
  out << "iterate  updating point  height of contour\n";
  for (const auto& rec : trace.records) {
    std::snprintf(buf, sizeof buf, "%.10f", rec.level);
    out << rec.index << "  " << point(rec.iterate) << "  " << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.10f", trace.result.minimum_value);
  out << trace.records.size() << "  " << point(trace.result.minimizer) << "  " << buf << "\n";
  out << "status: " << to_string(trace.result.status) << ", evaluations: " << trace.result.evaluations_used << "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contour-descent global optimizer"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "optimize a benchmark and write a trace");
  add_run_flags(run, run_flags);

  std::string rep_benchmark, rep_out;
  std::uint64_t rep_seed = ReproduceOptions{}.seed;
  auto* rep = app.add_subcommand("reproduce", "run a reference benchmark and check its thresholds");
  rep->add_option("--benchmark", rep_benchmark, "sphere_3, mccormick or ackley")->required();
  rep->add_option("--seed", rep_seed, "master seed");
  rep->add_option("--out", rep_out, "optional trace file path");

  std::string plot_trace, plot_dir = ".";
  auto* plot = app.add_subcommand("plotdata", "export roots and iterate path as CSV");
  plot->add_option("--trace", plot_trace, "trace file")->required();
  plot->add_option("--out-dir", plot_dir, "output directory");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run, run_flags, out);
    if (rep->parsed()) return cmd_reproduce(rep_benchmark, rep_seed, rep_out, out);
    if (plot->parsed()) return cmd_plotdata(plot_trace, plot_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace contour
