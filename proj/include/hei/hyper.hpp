#pragma once

#include <string>

#include "hei/gp.hpp"

namespace hei {

/// How the inverse-gamma hyperparameters (a, b) are chosen after the initial design.
struct HyperConfig {
  PriorScheme scheme = PriorScheme::Weak;
  double epsilon = 0.1;  ///< Weak: a = b = epsilon
  double zeta = 2.0;     ///< Gamma(zeta, iota) hyperprior on a; iota is a rate
  double iota = 2.0;
  double a_lo = 1e-3;
  double a_hi = 1e3;

  void validate() const;
};

/// log p(y; a, b) with beta and sigma^2 integrated out under the flat x IG(a, b) prior.
/// Includes the -(n-q)/2 log(2 pi) constant, so it is a proper log density in y.
double log_marginal(const FitStats& stats, double a, double b);

struct MarginalGradient {
  double da = 0.0;
  double db = 0.0;
};
MarginalGradient log_marginal_gradient(const FitStats& stats, double a, double b);

/// b*(a) = 2 a w / (n - q). Throws DegenerateFitError when w <= 0.
double profile_b(double a, double w, int n, int q);

/// log p(y; a, b*(a)) + (zeta - 1) log a - iota a.
double mmap_objective(const FitStats& stats, double a, double zeta, double iota);
/// Derivative of mmap_objective in a; strictly decreasing.
double mmap_derivative(const FitStats& stats, double a, double zeta, double iota);

struct MmapResult {
  double a = 0.0;
  double b = 0.0;
  bool at_lower = false;  ///< derivative already negative at a_lo
  bool at_upper = false;  ///< derivative still positive at a_hi (warning)
};

/// Maximizes the MMAP objective over a in [a_lo, a_hi] by bracketing on a
/// 32-point log grid and bisecting the derivative.
MmapResult mmap_estimate(const FitStats& stats, double zeta, double iota, double a_lo, double a_hi);

struct DsdResult {
  double a = 0.0;
  double kappa = 0.0;
  bool at_lower = false;
  bool at_upper = false;
};

/// Same search with b = kappa * n_ini.
DsdResult dsd_estimate(const FitStats& stats, int n_ini, double zeta, double iota, double a_lo,
                       double a_hi);

struct PriorEstimate {
  HierPrior prior;
  std::string warning;  ///< empty unless something was clamped or fell back
};

/// Prior for the run, estimated once from the initial-design fit. A degenerate
/// fit falls back to the weak prior and reports it in `warning`.
PriorEstimate estimate_prior(const HyperConfig& config, const GPFit& fit);

}  // namespace hei
