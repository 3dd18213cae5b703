#include "hei/local_search.hpp"

#include <algorithm>

#include "hei/errors.hpp"

namespace hei {

PatternSearchResult pattern_search_max(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                       const Eigen::VectorXd& upper,
                                       const PatternSearchOptions& options) {
  if (x0.size() != lower.size() || x0.size() != upper.size()) {
    throw ArgumentError("pattern_search_max: dimension mismatch");
  }
  const Eigen::VectorXd start = x0.cwiseMax(lower).cwiseMin(upper);
  PatternSearchResult r = pattern_search_max(f, start, f(start), lower, upper, options);
  ++r.evals;
  return r;
}

PatternSearchResult pattern_search_max(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x0, double f0,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const PatternSearchOptions& options) {
  if (x0.size() != lower.size() || x0.size() != upper.size()) {
    throw ArgumentError("pattern_search_max: dimension mismatch");
  }
  if (!(options.initial_step > 0.0) || !(options.tolerance > 0.0)) {
    throw ArgumentError("pattern_search_max: step and tolerance must be positive");
  }
  PatternSearchResult r;
  r.x = x0.cwiseMax(lower).cwiseMin(upper);
  r.value = f0;
  double step = options.initial_step;
  Eigen::VectorXd trial = r.x;
  while (step >= options.tolerance && r.evals < options.max_evals) {
    bool improved = false;
    for (Eigen::Index j = 0; j < r.x.size() && r.evals < options.max_evals; ++j) {
      for (const double dir : {1.0, -1.0}) {
        const double v = std::clamp(r.x[j] + dir * step, lower[j], upper[j]);
        if (v == r.x[j]) continue;
        trial = r.x;
        trial[j] = v;
        const double fv = f(trial);
        ++r.evals;
        if (fv > r.value) {
          r.value = fv;
          r.x = trial;
          improved = true;
          break;
        }
        if (r.evals >= options.max_evals) break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return r;
}

}  // namespace hei
