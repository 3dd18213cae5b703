#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hei/acquisition.hpp"
#include "hei/design.hpp"
#include "hei/gp.hpp"
#include "hei/hyper.hpp"
#include "hei/kernel.hpp"
#include "hei/rng.hpp"

namespace hei {

/// Black-box objective in domain coordinates. Throwing ObjectiveError or
/// returning a non-finite value aborts the run.
using Objective = std::function<double(const Eigen::VectorXd&)>;

/// The benchmarked method configurations.
enum class Method {
  EI_OK,
  EI_UK,
  HEI_WEAK,
  HEI_MMAP,
  HEI_DSD,
  SEI,
  UCB_OK,
  EPS_EI_OK,
  EPS_EI_UK,
  STAB_EI_UK
};

std::string_view to_string(Method method);
/// Accepts any case and ignores '_', '-' and spaces ("hei-dsd", "HEI_DSD", "heidsd").
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

inline constexpr double kEpsilonGreedy = 0.1;
/// Stabilization level min(0.1 d, 0.8).
double stab_gamma(int dim);

struct AcqOptimizerOptions {
  int candidates_per_dim = 200;
  int perturbations = 10;
  double perturbation_radius = 0.05;  ///< half-width in unit-cube units
  int refine_top = 5;
  double refine_tolerance = 1e-6;
  double refine_initial_step = 0.05;
  int refine_max_evals = 1000;
};

struct ThetaOptions {
  double lower = 1e-2;
  double upper = 100.0;
  int random_starts = 10;
  int refine_top = 3;            ///< best starts polished by pattern search
  double log_tolerance = 1e-3;   ///< pattern-search step floor in log(theta)
  int max_evals_per_start = 400;
};

struct RunConfig {
  std::string method_name = "custom";
  Domain domain;
  Objective objective;
  std::optional<double> f_min;  ///< known minimum, for gaps only

  AcqSpec acq;
  HyperConfig hyper;
  KernelFamily kernel = KernelFamily::Matern52;
  int trend_order = -1;  ///< -1 selects by BIC among trend_candidates
  std::vector<int> trend_candidates{0, 1, 2};

  int n_ini = 0;  ///< 0 means 10 d
  int n_tot = 120;
  std::uint64_t seed = 1;
  int lhd_restarts = kDefaultLhdRestarts;

  ThetaOptions theta;
  AcqOptimizerOptions optimizer;

  bool record_stability = true;  ///< estimate max s_n over a random pool each iteration
  long pool_cap = 200000;

  [[nodiscard]] int dim() const { return domain.dim(); }
  [[nodiscard]] int initial_size() const { return n_ini > 0 ? n_ini : 10 * dim(); }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Configuration for one of the benchmarked methods with the standard constants.
RunConfig make_run_config(Method method, const Domain& domain, Objective objective,
                          std::uint64_t seed);

/// One objective evaluation. Fields that do not apply are NaN.
struct RunRecord {
  int iteration = 0;  ///< 1-based evaluation count
  Eigen::VectorXd x;  ///< domain coordinates
  double y = 0.0;
  double best_y = 0.0;
  double acq_value = 0.0;
  double s_next = 0.0;
  double s_max_est = 0.0;
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd theta;  ///< unit-cube length-scales used to choose x
  bool initial = false;
  bool epsilon_step = false;
  bool fallback = false;  ///< stabilized constraint infeasible or degenerate fit
};

struct RunTrace {
  std::string method_name;
  int dim = 0;
  int n_ini = 0;
  int trend_order = 0;
  HierPrior prior;
  bool has_prior = false;
  long pool_size = 0;
  std::optional<double> f_min;
  std::vector<RunRecord> records;
  Eigen::VectorXd best_x;
  double best_y = 0.0;
  std::vector<std::string> warnings;
  std::string error;  ///< nonempty when the objective failed; records hold the partial run

  [[nodiscard]] bool ok() const { return error.empty(); }
};

/// Bounded maximum-likelihood length-scales (uniform prior) in unit-cube units.
struct ThetaEstimate {
  Eigen::VectorXd theta;
  double loglik = 0.0;
  bool improved = true;  ///< false when local search never beat the best start
};
ThetaEstimate estimate_lengthscales(const Dataset& data, KernelFamily family,
                                    const TrendModel& trend, const ThetaOptions& options, Rng& rng,
                                    const Eigen::VectorXd* previous = nullptr);

/// Optional minimum-s constraint of the stabilized wrapper: s(x) / s_max >= gamma.
struct StabConstraint {
  double s_max = 0.0;
  double gamma = 0.0;

  [[nodiscard]] bool feasible(double s) const { return s / s_max >= gamma; }
};

/// gamma times the largest s_n over the pool.
double stab_threshold(const GPFit& fit, double gamma, const Eigen::Ref<const Eigen::MatrixXd>& pool);

struct AcqChoice {
  Eigen::VectorXd x;  ///< unit cube
  double value = 0.0;
  double s = 0.0;
  bool fallback = false;
};

/// Multistart maximization over the unit cube: space-filling candidates,
/// perturbations of the incumbent, pattern-search refinement of the best few.
/// With `explore` set the criterion is s_n itself.
AcqChoice maximize_acquisition(const AcqState& state, const AcqSpec& spec,
                               const Eigen::VectorXd& incumbent, const AcqOptimizerOptions& options,
                               const std::optional<StabConstraint>& constraint, Rng& rng,
                               bool explore = false);

/// Stability pool size min(10^(d+2), cap).
long stability_pool_size(int dim, long cap);

RunTrace run_bo(const RunConfig& config);

}  // namespace hei
