#include "hei/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hei/errors.hpp"
#include "hei/special.hpp"

namespace hei {

namespace {

double degenerate_tol(double y_star) { return 1e-12 * (1.0 + std::fabs(y_star)); }

}  // namespace

double criterion_value(const AcqState& state, const AcqSpec& spec, double mean, double s2) {
  const GPFit& fit = *state.fit;
  const double s = std::sqrt(s2);
  const double tol = degenerate_tol(state.y_star);
  const double improvement = state.y_star - mean;
  switch (spec.kind) {
    case AcqKind::EI_OK:
    case AcqKind::EI_UK:
      return ei_value(improvement, std::sqrt(fit.sigma2_hat()) * s, tol);
    case AcqKind::HEI:
    case AcqKind::SEI: {
      const double df = 2.0 * state.prior.a + fit.n() - fit.q();
      const double scale = std::sqrt(posterior_sigma2(fit, state.prior)) * s;
      return spec.kind == AcqKind::HEI ? hei_value(improvement, scale, df, tol)
                                       : sei_value(improvement, scale, df, tol);
    }
    case AcqKind::UCB:
      return ucb_score(mean, std::sqrt(fit.sigma2_hat()) * s, spec.ucb_mult);
  }
  return 0.0;
}

double ei_value(double improvement, double sigma_s, double tol) {
  if (!(sigma_s > tol)) return std::max(improvement, 0.0);
  const double u = improvement / sigma_s;
  const double v = improvement * special::normal_cdf(u) + sigma_s * special::normal_pdf(u);
  return std::max(v, 0.0);
}

double hei_value(double improvement, double scale, double df, double tol) {
  if (!(df > 2.0)) {
    std::ostringstream msg;
    msg << "hei_value: degrees of freedom " << df << " must exceed 2";
    throw DegreesOfFreedomError(msg.str());
  }
  if (!(scale > tol)) return std::max(improvement, 0.0);
  const double m = std::sqrt(df / (df - 2.0));
  const double u = improvement / scale;
  const double v = improvement * special::t_cdf(df, u) +
                   m * scale * special::t_pdf(df - 2.0, u / m);
  return std::max(v, 0.0);
}

double sei_value(double improvement, double scale, double df, double tol) {
  if (!(df > 1.0)) {
    std::ostringstream msg;
    msg << "sei_value: degrees of freedom " << df << " must exceed 1";
    throw DegreesOfFreedomError(msg.str());
  }
  if (!(scale > tol)) return std::max(improvement, 0.0);
  const double u = improvement / scale;
  const double v = scale * (u * special::t_cdf(df, u) +
                            (df + u * u) / (df - 1.0) * special::t_pdf(df, u));
  return std::max(v, 0.0);
}

double ucb_score(double mean, double sigma_s, double mult) { return -(mean - mult * sigma_s); }

std::string_view to_string(AcqKind kind) {
  switch (kind) {
    case AcqKind::EI_OK: return "EI_OK";
    case AcqKind::EI_UK: return "EI_UK";
    case AcqKind::HEI: return "HEI";
    case AcqKind::SEI: return "SEI";
    case AcqKind::UCB: return "UCB";
  }
  return "unknown";
}

void AcqSpec::validate() const {
  if (epsilon < 0.0 || epsilon >= 1.0) throw ArgumentError("AcqSpec: epsilon must lie in [0, 1)");
  if (gamma < 0.0 || gamma > 1.0) throw ArgumentError("AcqSpec: gamma must lie in [0, 1]");
  if (kind == AcqKind::UCB && !(ucb_mult > 0.0)) {
    throw ArgumentError("AcqSpec: UCB multiplier must be positive");
  }
  if ((kind == AcqKind::HEI || kind == AcqKind::SEI) && (!(prior.a > 0.0) || !(prior.b > 0.0))) {
    throw ArgumentError("AcqSpec: prior a and b must be positive");
  }
}

AcqState::AcqState(std::shared_ptr<const GPFit> f, HierPrior p, double incumbent)
    : fit(std::move(f)), prior(p), y_star(incumbent) {
  if (!fit) throw ArgumentError("AcqState: null fit");
}

double evaluate(const AcqState& state, const AcqSpec& spec,
                const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto pred = state.fit->predict(x);
  return criterion_value(state, spec, pred.mean, pred.s2);
}

BatchValues evaluate_batch(const AcqState& state, const AcqSpec& spec,
                           const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  const auto pred = state.fit->predict_batch(Z);
  BatchValues out;
  out.value.resize(Z.rows());
  out.s.resize(Z.rows());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    out.value[i] = criterion_value(state, spec, pred.mean[i], pred.s2[i]);
    out.s[i] = std::sqrt(pred.s2[i]);
  }
  return out;
}

}  // namespace hei
