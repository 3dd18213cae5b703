#include "hei/gp.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hei/errors.hpp"
#include "hei/special.hpp"

namespace hei {

namespace {

constexpr double kNegativeS2Tolerance = 1e-10;
// sigma2_hat below this fraction of the mean squared response is rounding noise.
constexpr double kDegenerateRelative = 1e-20;

}  // namespace

Dataset::Dataset(Eigen::MatrixXd inputs, Eigen::VectorXd responses)
    : X(std::move(inputs)), y(std::move(responses)) {
  if (X.rows() != y.size()) throw ArgumentError("Dataset: X rows and y length differ");
  if (!X.allFinite() || !y.allFinite()) throw ArgumentError("Dataset: non-finite entries");
}

void Dataset::append(const Eigen::Ref<const Eigen::VectorXd>& x, double value) {
  if (y.size() > 0 && x.size() != X.cols()) throw ArgumentError("Dataset::append: dimension mismatch");
  if (!x.allFinite() || !std::isfinite(value)) throw ArgumentError("Dataset::append: non-finite entry");
  const Eigen::Index n = y.size();
  X.conservativeResize(n + 1, x.size());
  X.row(n) = x.transpose();
  y.conservativeResize(n + 1);
  y[n] = value;
}

GPFit::GPFit(const Dataset& data, KernelSpec kernel, TrendModel trend, double nugget)
    : kernel_(std::move(kernel)), trend_(std::move(trend)), X_(data.X), y_(data.y) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto q = static_cast<Eigen::Index>(trend_.size());
  if (n == 0) throw InsufficientDataError("GPFit: empty dataset");
  if (data.dim() != static_cast<std::size_t>(kernel_.dim()) ||
      static_cast<int>(data.dim()) != trend_.dim()) {
    throw ArgumentError("GPFit: dataset, kernel and trend dimensions disagree");
  }
  if (n < q) {
    std::ostringstream msg;
    msg << "GPFit: need at least as many observations as trend terms (n = " << n << ", q = "
        << q << ")";
    throw InsufficientDataError(msg.str());
  }

  CorrFactor factor = factor_corr_matrix(kernel_, X_, nugget);
  L_ = std::move(factor.lower);
  nugget_ = factor.nugget;

  const auto lower = L_.triangularView<Eigen::Lower>();
  P_ = trend_.design_matrix(X_);
  LinvP_ = lower.solve(P_);
  const Eigen::VectorXd Linv_y = lower.solve(data.y);

  const Eigen::MatrixXd G = LinvP_.transpose() * LinvP_;
  Eigen::LLT<Eigen::MatrixXd> g_llt(G);
  if (g_llt.info() != Eigen::Success) {
    throw ConditioningError("GPFit: trend Gram matrix G_n is not positive definite", nugget_);
  }
  LG_ = g_llt.matrixL();
  for (Eigen::Index i = 0; i < q; ++i) {
    if (!(LG_(i, i) > 0.0) || !std::isfinite(LG_(i, i))) {
      throw ConditioningError("GPFit: trend Gram matrix G_n is singular", nugget_);
    }
  }
  const auto g_lower = LG_.triangularView<Eigen::Lower>();
  Eigen::VectorXd rhs = LinvP_.transpose() * Linv_y;
  g_lower.solveInPlace(rhs);
  LG_.transpose().triangularView<Eigen::Upper>().solveInPlace(rhs);
  beta_ = std::move(rhs);

  const Eigen::VectorXd white_resid = Linv_y - LinvP_ * beta_;
  sigma2_ = white_resid.squaredNorm() / static_cast<double>(n);
  alpha_ = L_.transpose().triangularView<Eigen::Upper>().solve(white_resid);

  log_det_K_ = 2.0 * L_.diagonal().array().log().sum();
  log_det_G_ = 2.0 * LG_.diagonal().array().log().sum();

  const double scale = 1.0 + data.y.squaredNorm() / static_cast<double>(n);
  degenerate_ = !(sigma2_ > kDegenerateRelative * scale);
}

Eigen::MatrixXd GPFit::G() const { return LG_ * LG_.transpose(); }

FitStats GPFit::stats() const {
  FitStats s;
  s.n = n();
  s.q = q();
  s.w = 0.5 * static_cast<double>(s.n) * sigma2_;
  s.log_det_K = log_det_K_;
  s.log_det_G = log_det_G_;
  return s;
}

double GPFit::finish_s2(double s2, double tol_scale) const {
  if (s2 >= 0.0) return s2;
  if (s2 >= -kNegativeS2Tolerance * tol_scale) return 0.0;
  std::ostringstream msg;
  msg << "GPFit: posterior variance " << s2 << " is negative beyond rounding";
  throw ConditioningError(msg.str(), nugget_);
}

// With the nugget read as jitter on coincident inputs, the predictor at a design
// point reproduces y_i with zero variance. Repeated rows keep the plain formula,
// since K only carries the nugget on its diagonal.
Eigen::Index GPFit::design_row(const Eigen::Ref<const Eigen::VectorXd>& k,
                               const Eigen::Ref<const Eigen::VectorXd>& x) const {
  // Correlation at zero distance is exactly one, so other rows are skipped cheaply.
  Eigen::Index match = -1;
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    if (k[i] == 1.0 && X_.row(i).transpose() == x) {
      if (match >= 0) return -1;
      match = i;
    }
  }
  return match;
}

GPFit::Prediction GPFit::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != X_.cols()) throw ArgumentError("GPFit::predict: dimension mismatch");
  const Eigen::VectorXd k = corr_vector(kernel_, X_, x);
  if (const Eigen::Index row = design_row(k, x); row >= 0) return {y_[row], 0.0};
  const Eigen::VectorXd p = trend_.eval(x);
  const double mean = p.dot(beta_) + k.dot(alpha_);
  Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(k);
  Eigen::VectorXd h = p - LinvP_.transpose() * v;
  LG_.triangularView<Eigen::Lower>().solveInPlace(h);
  const double s2 = 1.0 - v.squaredNorm() + h.squaredNorm();
  return {mean, finish_s2(s2, 1.0)};
}

double GPFit::predict_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != X_.cols()) throw ArgumentError("GPFit::predict_mean: dimension mismatch");
  const Eigen::VectorXd k = corr_vector(kernel_, X_, x);
  if (const Eigen::Index row = design_row(k, x); row >= 0) return y_[row];
  return trend_.eval(x).dot(beta_) + k.dot(alpha_);
}

double GPFit::predict_s2(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return predict(x).s2;
}

double GPFit::predict_s2_no_trend(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != X_.cols()) throw ArgumentError("GPFit::predict_s2_no_trend: dimension mismatch");
  const Eigen::VectorXd k = corr_vector(kernel_, X_, x);
  if (design_row(k, x) >= 0) return 0.0;
  const Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(k);
  return finish_s2(1.0 - v.squaredNorm(), 1.0);
}

Eigen::VectorXd GPFit::predict_s2_batch(const Eigen::Ref<const Eigen::MatrixXd>& Z) const {
  return predict_batch(Z).s2;
}

GPFit::BatchPrediction GPFit::predict_batch(const Eigen::Ref<const Eigen::MatrixXd>& Z) const {
  if (Z.rows() > 0 && Z.cols() != X_.cols()) {
    throw ArgumentError("GPFit::predict_batch: dimension mismatch");
  }
  Eigen::MatrixXd V = cross_corr(kernel_, X_, Z);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(Z.rows()));
  for (Eigen::Index m = 0; m < Z.rows(); ++m) rows[m] = design_row(V.col(m), Z.row(m).transpose());
  const Eigen::MatrixXd Pz = trend_.design_matrix(Z);
  BatchPrediction out;
  out.mean = Pz * beta_ + V.transpose() * alpha_;
  L_.triangularView<Eigen::Lower>().solveInPlace(V);
  Eigen::MatrixXd H = Pz.transpose() - LinvP_.transpose() * V;
  LG_.triangularView<Eigen::Lower>().solveInPlace(H);
  out.s2.resize(Z.rows());
  for (Eigen::Index m = 0; m < Z.rows(); ++m) {
    if (rows[m] >= 0) {
      out.mean[m] = y_[rows[m]];
      out.s2[m] = 0.0;
    } else {
      out.s2[m] = finish_s2(1.0 - V.col(m).squaredNorm() + H.col(m).squaredNorm(), 1.0);
    }
  }
  return out;
}

double GPFit::profile_loglik() const {
  if (degenerate_) return -std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n());
  return -0.5 * nn * std::log(sigma2_) - 0.5 * log_det_K_ -
         0.5 * nn * (1.0 + std::log(2.0 * special::kPi));
}

double profile_loglik(const Dataset& data, const KernelSpec& kernel, const TrendModel& trend,
                      double nugget) {
  return GPFit(data, kernel, trend, nugget).profile_loglik();
}

std::string_view to_string(PriorScheme scheme) {
  switch (scheme) {
    case PriorScheme::Weak: return "weak";
    case PriorScheme::MMAP: return "mmap";
    case PriorScheme::DSD: return "dsd";
  }
  return "unknown";
}

HierPrior HierPrior::weak(double eps) {
  if (!(eps > 0.0)) throw ArgumentError("HierPrior::weak: epsilon must be positive");
  return HierPrior{eps, eps, PriorScheme::Weak, 0.0};
}

HierPrior HierPrior::fixed(double a, double b, PriorScheme scheme) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("HierPrior: a and b must be positive");
  return HierPrior{a, b, scheme, 0.0};
}

HierPrior HierPrior::dsd(double a, double kappa, std::size_t n) {
  if (!(a > 0.0) || !(kappa > 0.0)) throw ArgumentError("HierPrior::dsd: a and kappa must be positive");
  return HierPrior{a, kappa * static_cast<double>(n), PriorScheme::DSD, kappa};
}

HierPrior HierPrior::at_sample_size(std::size_t n) const {
  if (scheme != PriorScheme::DSD) return *this;
  return dsd(a, kappa, n);
}

double PredictiveT::pdf(double f) const {
  if (!(scale > 0.0)) throw ArgumentError("PredictiveT::pdf: scale must be positive");
  return special::t_pdf(df, (f - loc) / scale) / scale;
}

double PredictiveT::cdf(double f) const {
  if (!(scale > 0.0)) return f < loc ? 0.0 : 1.0;
  return special::t_cdf(df, (f - loc) / scale);
}

double posterior_sigma2(const GPFit& fit, const HierPrior& prior) {
  const double n = fit.n();
  const double q = fit.q();
  const double a_n = prior.a + 0.5 * (n - q);
  const double b_n = prior.b + 0.5 * n * fit.sigma2_hat();
  return b_n / a_n;
}

PredictiveT hierarchical_posterior(const GPFit& fit, const HierPrior& prior,
                                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double df = 2.0 * prior.a + fit.n() - fit.q();
  if (!(df > 2.0)) {
    std::ostringstream msg;
    msg << "hierarchical_posterior: degrees of freedom " << df << " must exceed 2";
    throw DegreesOfFreedomError(msg.str());
  }
  const auto pred = fit.predict(x);
  return PredictiveT{df, pred.mean, std::sqrt(posterior_sigma2(fit, prior) * pred.s2)};
}

}  // namespace hei
