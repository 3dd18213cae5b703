#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hei/driver.hpp"

namespace hei {

/// Settings shared by the run and suite subcommands. Built from a key = value
/// file (with # comments) and then overridden by command-line flags.
struct CliConfig {
  std::string function;          ///< built-in test function name
  std::string command;           ///< external objective (sh -c command line)
  std::vector<double> lower;     ///< external objective domain
  std::vector<double> upper;
  std::optional<double> f_min;   ///< external objective only
  std::vector<std::string> methods{"HEI_DSD"};
  int n_ini = 0;
  int n_tot = 120;
  std::uint64_t seed = 1;
  int replications = 20;
  int workers = 0;               ///< 0 means one per logical core
  std::string output;
  std::string kernel = "matern52";
  std::string trend = "bic";     ///< "bic" or a fixed order
  double theta_lo = 1e-2;
  double theta_hi = 100.0;
  double timeout = 600.0;
  bool stability = true;
  long pool_cap = 200000;
  int lhd_restarts = kDefaultLhdRestarts;

  /// Sets one key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError unless exactly one objective source is configured, etc.
  void validate() const;

  [[nodiscard]] std::vector<Method> parsed_methods() const;
  [[nodiscard]] Domain domain() const;

  /// Full RunConfig for one method. The objective is left empty.
  [[nodiscard]] RunConfig run_config(Method method, std::uint64_t run_seed) const;
};

/// Reads key = value lines. Throws ConfigError (with the line number) on a
/// missing file, a malformed line or an unknown key.
void load_config_file(const std::string& path, CliConfig& config);
void load_config_stream(std::istream& in, CliConfig& config, const std::string& source);

/// Keys accepted by CliConfig::set.
const std::vector<std::string>& config_keys();

}  // namespace hei
