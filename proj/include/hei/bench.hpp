#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hei/design.hpp"
#include "hei/driver.hpp"

namespace hei {

// Test functions. Each throws ArgumentError outside its domain.
double eval_branin(const Eigen::Ref<const Eigen::VectorXd>& x);    // [0,1]^2
double eval_camel3(const Eigen::Ref<const Eigen::VectorXd>& x);    // [-2,2]^2
double eval_camel6(const Eigen::Ref<const Eigen::VectorXd>& x);    // [-2,2]^2
double eval_levy6(const Eigen::Ref<const Eigen::VectorXd>& x);     // [-10,10]^6
double eval_ackley10(const Eigen::Ref<const Eigen::VectorXd>& x);  // [-5,5]^10

struct TestFunction {
  std::string name;
  int dim = 0;
  Domain domain;
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> eval;
  double f_min = 0.0;
  std::string f_min_source;
  std::vector<Eigen::VectorXd> minimizers;

  [[nodiscard]] Objective objective() const;
};

const std::vector<TestFunction>& test_functions();
/// Throws ArgumentError for an unknown name.
const TestFunction& find_test_function(const std::string& name);

struct SuiteConfig {
  std::vector<Method> methods;
  int replications = 20;
  std::uint64_t base_seed = 1;
  int workers = 1;
  /// Builds the per-method, per-replication config. The default uses
  /// make_run_config on `function` with seed derive_seed(base_seed, r).
  std::function<RunConfig(Method, int replication, std::uint64_t seed)> make_config;
};

/// Default suite configuration for a built-in function.
SuiteConfig make_suite_config(const TestFunction& function, std::vector<Method> methods,
                              int replications, int n_tot, int n_ini, std::uint64_t base_seed);

struct GapRow {
  std::string method;
  int iteration = 0;
  int n_ok = 0;
  double mean_gap = 0.0;
  double median_gap = 0.0;
  double mean_log10_gap = 0.0;
  double median_log10_gap = 0.0;
};

struct SuiteResult {
  std::vector<Method> methods;
  /// traces[m][r] for method index m and replication r.
  std::vector<std::vector<RunTrace>> traces;
  std::vector<GapRow> table;

  [[nodiscard]] int successes(std::size_t method_index) const;
  /// Mean over successful replications of the final gap.
  [[nodiscard]] double mean_final_gap(std::size_t method_index) const;
};

/// Runs every (method, replication) pair, possibly on several threads, and
/// assembles the gap table in (method, iteration) order. Requires f_min set on
/// every config.
SuiteResult run_suite(const SuiteConfig& config);

struct StabilityPoint {
  int iteration = 0;
  double log_ratio = 0.0;
  bool epsilon_step = false;
};

/// log(s_n(x_{n+1}) / s_max) for every sequential iteration.
std::vector<StabilityPoint> stability_trace(const RunTrace& trace);

}  // namespace hei
