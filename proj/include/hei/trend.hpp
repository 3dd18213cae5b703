#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hei/kernel.hpp"

namespace hei {

struct Dataset;

/// Number of complete polynomial basis functions of total degree <= order in
/// `dim` variables, i.e. C(dim + order, order).
std::size_t basis_count(int order, int dim);

/// Complete polynomial trend p(x) of total degree <= order.
///
/// Monomials are enumerated degree by degree. Within a degree, terms with fewer
/// distinct variables come first and ties are broken by descending exponent
/// vector, which for order 2 gives
///   1, x1..xd, x1^2..xd^2, x1x2, x1x3, ..., x(d-1)xd.
/// The basis of order l is therefore a prefix of the basis of order l + 1.
class TrendModel {
 public:
  TrendModel() : TrendModel(0, 1) {}
  TrendModel(int order, int dim);

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return exponents_.size(); }
  [[nodiscard]] const std::vector<std::vector<int>>& exponents() const { return exponents_; }

  [[nodiscard]] Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// P_n: one row p(x_i)^T per row of X.
  [[nodiscard]] Eigen::MatrixXd design_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

 private:
  int order_;
  int dim_;
  std::vector<std::vector<int>> exponents_;
};

/// BIC value -2 log L + q log n of the order-`order` trend, with the kernel held fixed.
/// Returns -infinity when the fit is degenerate, i.e. the trend alone reproduces y.
double bic_value(const Dataset& data, const KernelSpec& kernel, int order,
                 double nugget = kDefaultNugget);

/// Trend order minimizing BIC among the feasible candidates (q < n); ties go to
/// the smaller order. Throws ArgumentError on an empty list or when no
/// candidate is feasible.
int select_order_bic(const Dataset& data, const KernelSpec& kernel, std::span<const int> candidates,
                     double nugget = kDefaultNugget);

}  // namespace hei
