#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hei {

struct PatternSearchOptions {
  double initial_step = 0.1;
  double tolerance = 1e-6;  ///< stop once the step falls below this
  int max_evals = 2000;
};

struct PatternSearchResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
};

/// Compass search maximizing f inside the box [lower, upper]. Polls +step and
/// -step along each coordinate, moves on the first strict improvement and
/// halves the step after a full unsuccessful sweep.
PatternSearchResult pattern_search_max(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                       const Eigen::VectorXd& upper,
                                       const PatternSearchOptions& options = {});

/// Same, starting from a point whose value is already known.
PatternSearchResult pattern_search_max(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x0, double f0,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const PatternSearchOptions& options = {});

}  // namespace hei
