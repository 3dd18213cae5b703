#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "hei/gp.hpp"

namespace hei {

/// Closed-form criteria. Each returns max(I, 0) when the scale is below `tol`.
double ei_value(double improvement, double sigma_s, double tol = 1e-12);
double hei_value(double improvement, double scale, double df, double tol = 1e-12);
double sei_value(double improvement, double scale, double df, double tol = 1e-12);
/// Lower-confidence-bound score for minimization: -(mean - mult * sigma_s).
double ucb_score(double mean, double sigma_s, double mult);

enum class AcqKind { EI_OK, EI_UK, HEI, SEI, UCB };
std::string_view to_string(AcqKind kind);

inline constexpr double kUcbMultiplier = 2.96;
inline constexpr double kSeiA = 0.2;
inline constexpr double kSeiB = 12.0;

struct AcqSpec {
  AcqKind kind = AcqKind::HEI;
  HierPrior prior;               ///< HEI and SEI only
  double ucb_mult = kUcbMultiplier;
  double epsilon = 0.0;          ///< epsilon-greedy probability; 0 disables
  double gamma = 0.0;            ///< stabilization level; 0 disables

  [[nodiscard]] bool epsilon_greedy() const { return epsilon > 0.0; }
  [[nodiscard]] bool stabilized() const { return gamma > 0.0; }
  void validate() const;
};

/// Fitted model and incumbent at one iteration.
struct AcqState {
  std::shared_ptr<const GPFit> fit;
  HierPrior prior;  ///< already adjusted to the current sample size
  double y_star = 0.0;  ///< min_i y_i

  AcqState(std::shared_ptr<const GPFit> f, HierPrior p, double incumbent);
};

/// Criterion from a prediction (mean, s_n^2) already computed at some point.
double criterion_value(const AcqState& state, const AcqSpec& spec, double mean, double s2);

/// Criterion value at one point.
double evaluate(const AcqState& state, const AcqSpec& spec,
                const Eigen::Ref<const Eigen::VectorXd>& x);

/// Criterion values plus s_n at every row of Z.
struct BatchValues {
  Eigen::VectorXd value;
  Eigen::VectorXd s;
};
BatchValues evaluate_batch(const AcqState& state, const AcqSpec& spec,
                           const Eigen::Ref<const Eigen::MatrixXd>& Z);

}  // namespace hei
