#include "hei/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hei/bench.hpp"
#include "hei/errors.hpp"
#include "hei/trace_io.hpp"

namespace hei {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const ArgumentError&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "function", "command", "lower",    "upper",      "f_min",  "method",   "methods",
      "n_ini",    "n_tot",   "seed",     "replications", "workers", "output", "kernel",
      "trend",    "theta_lo", "theta_hi", "timeout",   "stability", "pool_cap", "lhd_restarts"};
  return keys;
}

void CliConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "function") {
    function = v;
  } else if (key == "command") {
    command = v;
  } else if (key == "lower" || key == "upper") {
    std::vector<double> vals;
    for (const auto& tok : split_list(v)) vals.push_back(parse_real(key, tok));
    (key == "lower" ? lower : upper) = vals;
  } else if (key == "f_min") {
    f_min = parse_real(key, v);
  } else if (key == "method" || key == "methods") {
    methods = split_list(v);
  } else if (key == "n_ini") {
    n_ini = parse_int<int>(key, v);
  } else if (key == "n_tot") {
    n_tot = parse_int<int>(key, v);
  } else if (key == "seed") {
    seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "replications") {
    replications = parse_int<int>(key, v);
  } else if (key == "workers") {
    workers = parse_int<int>(key, v);
  } else if (key == "output") {
    output = v;
  } else if (key == "kernel") {
    kernel = v;
  } else if (key == "trend") {
    trend = v;
  } else if (key == "theta_lo") {
    theta_lo = parse_real(key, v);
  } else if (key == "theta_hi") {
    theta_hi = parse_real(key, v);
  } else if (key == "timeout") {
    timeout = parse_real(key, v);
  } else if (key == "stability") {
    stability = parse_bool(key, v);
  } else if (key == "pool_cap") {
    pool_cap = parse_int<long>(key, v);
  } else if (key == "lhd_restarts") {
    lhd_restarts = parse_int<int>(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void load_config_stream(std::istream& in, CliConfig& config, const std::string& source) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    try {
      config.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void load_config_file(const std::string& path, CliConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  load_config_stream(in, config, path);
}

std::vector<Method> CliConfig::parsed_methods() const {
  std::vector<Method> out;
  for (const auto& m : methods) out.push_back(parse_method(m));
  return out;
}

Domain CliConfig::domain() const {
  if (!function.empty()) return find_test_function(function).domain;
  if (lower.size() != upper.size() || lower.empty()) {
    throw ConfigError("lower and upper must list the same, nonzero number of bounds");
  }
  try {
    return Domain(Eigen::Map<const Eigen::VectorXd>(lower.data(), static_cast<Eigen::Index>(lower.size())),
                  Eigen::Map<const Eigen::VectorXd>(upper.data(), static_cast<Eigen::Index>(upper.size())));
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

void CliConfig::validate() const {
  if (function.empty() == command.empty()) {
    throw ConfigError("set exactly one of 'function' (built-in) or 'command' (external)");
  }
  if (!function.empty()) {
    try {
      (void)find_test_function(function);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
    if (!lower.empty() || !upper.empty()) {
      throw ConfigError("lower/upper apply to external objectives only");
    }
  }
  (void)domain();
  if (methods.empty()) throw ConfigError("no methods given");
  (void)parsed_methods();
  try {
    (void)parse_kernel_family(kernel);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (trend != "bic") {
    const int order = parse_int<int>("trend", trend);
    if (order < 0) throw ConfigError("trend: order must be nonnegative or 'bic'");
  }
  if (replications < 1) throw ConfigError("replications must be positive");
  if (workers < 0) throw ConfigError("workers must be nonnegative");
  if (!(timeout > 0.0)) throw ConfigError("timeout must be positive");
  for (const Method m : parsed_methods()) {
    RunConfig rc = run_config(m, seed);
    rc.objective = [](const Eigen::VectorXd&) { return 0.0; };
    rc.validate();
  }
}

RunConfig CliConfig::run_config(Method method, std::uint64_t run_seed) const {
  RunConfig c = make_run_config(method, domain(), Objective{}, run_seed);
  if (!function.empty()) {
    c.f_min = find_test_function(function).f_min;
  } else {
    c.f_min = f_min;
  }
  c.n_ini = n_ini;
  c.n_tot = n_tot;
  c.kernel = parse_kernel_family(kernel);
  if (trend != "bic" && c.trend_order < 0) c.trend_order = parse_int<int>("trend", trend);
  c.theta.lower = theta_lo;
  c.theta.upper = theta_hi;
  c.record_stability = stability;
  c.pool_cap = pool_cap;
  c.lhd_restarts = lhd_restarts;
  return c;
}

}  // namespace hei
