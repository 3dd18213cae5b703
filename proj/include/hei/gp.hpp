#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "hei/kernel.hpp"
#include "hei/trend.hpp"

namespace hei {

/// Evaluated design: one row of X per point, with matching responses y.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Dataset() = default;
  Dataset(Eigen::MatrixXd inputs, Eigen::VectorXd responses);

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }

  void append(const Eigen::Ref<const Eigen::VectorXd>& x, double value);
};

/// Sufficient statistics of a fit for the marginal likelihood in (a, b).
struct FitStats {
  double w = 0.0;  ///< (y^T K^-1 y - beta^T G beta) / 2
  double log_det_K = 0.0;
  double log_det_G = 0.0;
  int n = 0;
  int q = 0;
};

/// Universal-kriging fit with beta and sigma^2 estimated by generalized least squares.
/// Immutable after construction; all queries are const and thread-safe.
class GPFit {
 public:
  GPFit(const Dataset& data, KernelSpec kernel, TrendModel trend, double nugget = kDefaultNugget);

  [[nodiscard]] const KernelSpec& kernel() const { return kernel_; }
  [[nodiscard]] const TrendModel& trend() const { return trend_; }
  [[nodiscard]] const Eigen::MatrixXd& inputs() const { return X_; }
  [[nodiscard]] double nugget() const { return nugget_; }
  [[nodiscard]] int n() const { return static_cast<int>(X_.rows()); }
  [[nodiscard]] int q() const { return static_cast<int>(trend_.size()); }
  [[nodiscard]] const Eigen::VectorXd& beta_hat() const { return beta_; }
  [[nodiscard]] double sigma2_hat() const { return sigma2_; }
  [[nodiscard]] const Eigen::MatrixXd& chol_K() const { return L_; }
  [[nodiscard]] const Eigen::MatrixXd& trend_matrix() const { return P_; }
  /// G_n = P^T K^-1 P.
  [[nodiscard]] Eigen::MatrixXd G() const;
  [[nodiscard]] const Eigen::VectorXd& Kinv_resid() const { return alpha_; }
  [[nodiscard]] FitStats stats() const;
  [[nodiscard]] double log_det_K() const { return log_det_K_; }
  [[nodiscard]] double log_det_G() const { return log_det_G_; }

  /// True when the residual quadratic form vanishes (e.g. constant data with a
  /// constant trend), so scale estimates are zero.
  [[nodiscard]] bool degenerate() const { return degenerate_; }

  [[nodiscard]] double predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// s_n^2(x), the correlation-scale posterior variance including the trend term.
  [[nodiscard]] double predict_s2(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// k^T K^-1 k subtracted from 1, without the trend-uncertainty term.
  [[nodiscard]] double predict_s2_no_trend(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  struct Prediction {
    double mean;
    double s2;
  };
  [[nodiscard]] Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// s_n^2 at every row of Z.
  [[nodiscard]] Eigen::VectorXd predict_s2_batch(const Eigen::Ref<const Eigen::MatrixXd>& Z) const;

  struct BatchPrediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd s2;
  };
  [[nodiscard]] BatchPrediction predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& Z) const;

  /// Profile log-likelihood with beta and sigma^2 concentrated out; -infinity
  /// when the fit is degenerate.
  [[nodiscard]] double profile_loglik() const;

 private:
  double finish_s2(double s2, double tol_scale) const;
  /// Index of the single design row equal to x, or -1. `k` is the correlation
  /// vector at x.
  Eigen::Index design_row(const Eigen::Ref<const Eigen::VectorXd>& k,
                          const Eigen::Ref<const Eigen::VectorXd>& x) const;

  KernelSpec kernel_;
  TrendModel trend_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  double nugget_ = 0.0;
  Eigen::MatrixXd L_;      // chol(K_n), lower
  Eigen::MatrixXd P_;      // n x q
  Eigen::MatrixXd LinvP_;  // L^-1 P
  Eigen::MatrixXd LG_;     // chol(G_n), lower
  Eigen::VectorXd beta_;
  Eigen::VectorXd alpha_;  // K^-1 (y - P beta)
  double sigma2_ = 0.0;
  double log_det_K_ = 0.0;
  double log_det_G_ = 0.0;
  bool degenerate_ = false;
};

/// Profile log-likelihood -(n/2) log sigma2_hat - (1/2) log det K - (n/2)(1 + log 2 pi).
double profile_loglik(const Dataset& data, const KernelSpec& kernel, const TrendModel& trend,
                      double nugget = kDefaultNugget);

enum class PriorScheme { Weak, MMAP, DSD };
std::string_view to_string(PriorScheme scheme);

/// Inverse-gamma IG(a, b) prior on sigma^2 with a flat prior on beta.
/// Under DSD, b = kappa * n and must be refreshed with at_sample_size().
struct HierPrior {
  double a = 0.1;
  double b = 0.1;
  PriorScheme scheme = PriorScheme::Weak;
  double kappa = 0.0;

  static HierPrior weak(double eps);
  static HierPrior fixed(double a, double b, PriorScheme scheme = PriorScheme::MMAP);
  static HierPrior dsd(double a, double kappa, std::size_t n);

  /// The prior in effect at sample size n (only DSD changes).
  [[nodiscard]] HierPrior at_sample_size(std::size_t n) const;
};

/// Non-standardized Student-t predictive distribution of f(x).
struct PredictiveT {
  double df = 0.0;
  double loc = 0.0;
  double scale = 0.0;

  [[nodiscard]] double pdf(double f) const;
  [[nodiscard]] double cdf(double f) const;
};

/// Posterior sigma~^2 = b_n / a_n with a_n = a + (n - q)/2, b_n = b + n sigma2_hat / 2.
double posterior_sigma2(const GPFit& fit, const HierPrior& prior);

/// Predictive t distribution of f(x) under the hierarchical model.
/// Throws DegreesOfFreedomError when 2a + n - q <= 2.
PredictiveT hierarchical_posterior(const GPFit& fit, const HierPrior& prior,
                                   const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace hei
