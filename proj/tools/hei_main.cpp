// hei: run Bayesian optimization on built-in or external objectives.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hei/bench.hpp"
#include "hei/config.hpp"
#include "hei/driver.hpp"
#include "hei/errors.hpp"
#include "hei/external_objective.hpp"
#include "hei/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitObjective = 3;
constexpr int kExitSuite = 4;

struct CommonFlags {
  std::string config_path;
  std::map<std::string, std::string> values;  // flag overrides, keyed like the config file
  std::vector<std::string> sets;              // --set key=value
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "key = value config file");
  const auto opt = [&](const char* flag, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        flag, [&f, key](const std::string& v) { f.values[key] = v; }, help);
  };
  opt("--function", "function", "built-in test function");
  opt("--command", "command", "external objective command (run under /bin/sh -c)");
  opt("--lower", "lower", "external domain lower bounds, comma separated");
  opt("--upper", "upper", "external domain upper bounds, comma separated");
  opt("--f-min", "f_min", "known minimum of an external objective");
  opt("-m,--method", "methods", "method name(s), comma separated");
  opt("--n-ini", "n_ini", "initial design size (default 10 d)");
  opt("--n-tot", "n_tot", "total evaluation budget");
  opt("-s,--seed", "seed", "base seed");
  opt("-o,--output", "output", "output file (default stdout)");
  opt("--kernel", "kernel", "matern12 | matern32 | matern52 | sqexp");
  opt("--trend", "trend", "bic or a fixed trend order");
  opt("--timeout", "timeout", "external objective timeout per evaluation, seconds");
  opt("--stability", "stability", "record the max-variance diagnostic (true/false)");
  cmd->add_option("--set", f.sets, "override any config key: key=value");
}

hei::CliConfig resolve(const CommonFlags& f) {
  hei::CliConfig c;
  if (!f.config_path.empty()) hei::load_config_file(f.config_path, c);
  if (const char* env = std::getenv("HEI_SEED"); env != nullptr && *env != '\0') {
    c.set("seed", env);
  }
  for (const auto& [k, v] : f.values) c.set(k, v);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw hei::ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

hei::Objective make_objective(const hei::CliConfig& c) {
  if (!c.function.empty()) return hei::find_test_function(c.function).objective();
  return hei::make_external_objective(c.command, c.timeout);
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw hei::ConfigError("cannot open output file '" + path + "'");
  return file;
}

int cmd_run(const CommonFlags& flags) {
  const hei::CliConfig c = resolve(flags);
  const auto methods = c.parsed_methods();
  if (methods.size() != 1) throw hei::ConfigError("run takes exactly one method");
  hei::RunConfig rc = c.run_config(methods.front(), c.seed);
  std::ofstream file;
  std::ostream& out = open_output(c.output, file);
  rc.objective = make_objective(c);
  const hei::RunTrace trace = hei::run_bo(rc);
  out << hei::trace_csv_header(trace.dim) << '\n';
  hei::write_trace_rows(out, trace, 1);
  out.flush();
  for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
  if (!trace.ok()) {
    std::cerr << "error: " << trace.error << " (after " << trace.records.size()
              << " evaluations)\n";
    return kExitObjective;
  }
  return kExitOk;
}

int cmd_suite(const CommonFlags& flags, const std::string& traces_path) {
  const hei::CliConfig c = resolve(flags);
  if (c.function.empty() && !c.f_min) {
    throw hei::ConfigError("suites on an external objective need f_min");
  }
  hei::SuiteConfig s;
  s.methods = c.parsed_methods();
  s.replications = c.replications;
  s.base_seed = c.seed;
  s.workers = c.workers > 0 ? c.workers
                            : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  s.make_config = [&c](hei::Method m, int, std::uint64_t seed) {
    hei::RunConfig rc = c.run_config(m, seed);
    rc.objective = make_objective(c);
    return rc;
  };

  std::ofstream file;
  std::ostream& out = open_output(c.output, file);
  std::ofstream traces_file;
  if (!traces_path.empty()) {
    traces_file.open(traces_path, std::ios::binary | std::ios::trunc);
    if (!traces_file) throw hei::ConfigError("cannot open traces file '" + traces_path + "'");
  }

  const hei::SuiteResult result = hei::run_suite(s);
  hei::write_gap_table(out, result.table);
  out.flush();

  if (traces_file) {
    std::vector<hei::RunTrace> all;
    for (const auto& per_method : result.traces) {
      for (const auto& t : per_method) {
        if (t.dim > 0) all.push_back(t);
      }
    }
    if (!all.empty()) hei::write_trace_csv(traces_file, all);
  }

  int code = kExitOk;
  for (std::size_t m = 0; m < result.methods.size(); ++m) {
    const int ok = result.successes(m);
    std::cerr << hei::to_string(result.methods[m]) << ": " << ok << "/" << c.replications
              << " replications succeeded\n";
    for (std::size_t r = 0; r < result.traces[m].size(); ++r) {
      const auto& t = result.traces[m][r];
      if (!t.ok()) std::cerr << "  replication " << r << ": " << t.error << '\n';
    }
    if (2 * ok < c.replications) code = kExitSuite;
  }
  return code;
}

int cmd_functions() {
  for (const auto& f : hei::test_functions()) {
    std::cout << f.name << "  d=" << f.dim << "  domain=";
    for (int j = 0; j < f.dim; ++j) {
      std::cout << (j ? "x" : "") << '[' << hei::format_double(f.domain.lower[j]) << ','
                << hei::format_double(f.domain.upper[j]) << ']';
    }
    std::cout << "  f_min=" << hei::format_double(f.f_min) << "  (" << f.f_min_source << ")\n";
  }
  return kExitOk;
}

int cmd_ratio(const std::string& trace_path, const std::string& output) {
  std::ifstream in(trace_path);
  if (!in) throw hei::ConfigError("cannot open trace file '" + trace_path + "'");
  std::vector<hei::TraceFileRun> runs;
  try {
    runs = hei::read_trace_csv(in);
  } catch (const hei::ArgumentError& e) {
    throw hei::ConfigError(e.what());
  }
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  out << "run_id,method,iteration,log_ratio\n";
  for (const auto& run : runs) {
    std::vector<hei::StabilityPoint> pts;
    try {
      pts = hei::stability_trace(run.trace);
    } catch (const hei::ArgumentError& e) {
      throw hei::ConfigError("run " + std::to_string(run.run_id) + ": " + e.what());
    }
    for (const auto& p : pts) {
      out << run.run_id << ',' << run.trace.method_name << ',' << p.iteration << ','
          << hei::format_double(p.log_ratio) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization with hierarchical expected improvement"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "optimize one objective and write a CSV trace");
  add_common(run, run_flags);

  CommonFlags suite_flags;
  std::string traces_path;
  auto* suite = app.add_subcommand("suite", "replicate several methods and write a gap table");
  add_common(suite, suite_flags);
  suite->add_option("--replications", [&](const CLI::results_t& r) {
    suite_flags.values["replications"] = r.front();
    return true;
  }, "replications per method");
  suite->add_option("--workers", [&](const CLI::results_t& r) {
    suite_flags.values["workers"] = r.front();
    return true;
  }, "concurrent replications (default: logical cores)");
  suite->add_option("--traces", traces_path, "also write every trace to this CSV file");

  app.add_subcommand("functions", "list built-in test functions");

  std::string ratio_input;
  std::string ratio_output;
  auto* ratio = app.add_subcommand("ratio", "stability log-ratios from a saved trace");
  ratio->add_option("trace", ratio_input, "trace CSV written by run or suite")->required();
  ratio->add_option("-o,--output", ratio_output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*suite) return cmd_suite(suite_flags, traces_path);
    if (app.got_subcommand("functions")) return cmd_functions();
    if (*ratio) return cmd_ratio(ratio_input, ratio_output);
  } catch (const hei::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hei::ObjectiveError& e) {
    std::cerr << "objective error: " << e.what() << '\n';
    return kExitObjective;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
