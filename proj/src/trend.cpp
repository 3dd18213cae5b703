#include "hei/trend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hei/errors.hpp"
#include "hei/gp.hpp"

namespace hei {

namespace {

void compositions(int dim, int degree, std::vector<int>& current, int pos,
                  std::vector<std::vector<int>>& out) {
  if (pos == dim - 1) {
    current[pos] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[pos] = e;
    compositions(dim, degree - e, current, pos + 1, out);
  }
}

}  // namespace

std::size_t basis_count(int order, int dim) {
  if (order < 0 || dim < 1) throw ArgumentError("basis_count: need order >= 0 and dim >= 1");
  // C(dim + order, order), accumulated so every intermediate is an integer.
  std::size_t c = 1;
  for (int i = 1; i <= order; ++i) {
    c = c * static_cast<std::size_t>(dim + i) / static_cast<std::size_t>(i);
  }
  return c;
}

TrendModel::TrendModel(int order, int dim) : order_(order), dim_(dim) {
  if (order < 0) throw ArgumentError("TrendModel: order must be nonnegative");
  if (dim < 1) throw ArgumentError("TrendModel: dimension must be positive");
  for (int degree = 0; degree <= order; ++degree) {
    std::vector<std::vector<int>> level;
    std::vector<int> current(dim, 0);
    compositions(dim, degree, current, 0, level);
    // compositions() already yields descending lexicographic order; a stable
    // sort on the support size keeps it within each group.
    std::stable_sort(level.begin(), level.end(), [](const auto& a, const auto& b) {
      const auto nz = [](const std::vector<int>& v) {
        return std::count_if(v.begin(), v.end(), [](int e) { return e != 0; });
      };
      return nz(a) < nz(b);
    });
    exponents_.insert(exponents_.end(), level.begin(), level.end());
  }
}

Eigen::VectorXd TrendModel::eval(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim_) throw ArgumentError("TrendModel::eval: dimension mismatch");
  Eigen::VectorXd p(static_cast<Eigen::Index>(exponents_.size()));
  for (std::size_t t = 0; t < exponents_.size(); ++t) {
    double v = 1.0;
    const auto& e = exponents_[t];
    for (int j = 0; j < dim_; ++j) {
      for (int k = 0; k < e[j]; ++k) v *= x[j];
    }
    p[static_cast<Eigen::Index>(t)] = v;
  }
  return p;
}

Eigen::MatrixXd TrendModel::design_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.rows() > 0 && X.cols() != dim_) {
    throw ArgumentError("TrendModel::design_matrix: dimension mismatch");
  }
  Eigen::MatrixXd P(X.rows(), static_cast<Eigen::Index>(size()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) P.row(i) = eval(X.row(i).transpose()).transpose();
  return P;
}

double bic_value(const Dataset& data, const KernelSpec& kernel, int order, double nugget) {
  const TrendModel trend(order, static_cast<int>(data.dim()));
  const GPFit fit(data, kernel, trend, nugget);
  // The trend reproduces the data exactly.
  if (fit.degenerate()) return -std::numeric_limits<double>::infinity();
  const double ll = fit.profile_loglik();
  const double n = static_cast<double>(data.size());
  return -2.0 * ll + static_cast<double>(trend.size()) * std::log(n);
}

int select_order_bic(const Dataset& data, const KernelSpec& kernel, std::span<const int> candidates,
                     double nugget) {
  if (candidates.empty()) throw ArgumentError("select_order_bic: empty candidate list");
  std::vector<int> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::optional<int> best;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int order : sorted) {
    if (order < 0) continue;
    if (basis_count(order, static_cast<int>(data.dim())) >= data.size()) continue;
    double bic = 0.0;
    try {
      bic = bic_value(data, kernel, order, nugget);
    } catch (const ConditioningError&) {
      continue;
    }
    if (!best || bic < best_bic) {
      best = order;
      best_bic = bic;
    }
  }
  if (!best) throw ArgumentError("select_order_bic: no feasible candidate order (need q < n)");
  return *best;
}

}  // namespace hei
