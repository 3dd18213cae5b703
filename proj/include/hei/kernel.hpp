#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace hei {

enum class KernelFamily { Matern12, Matern32, Matern52, SquaredExponential };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Stationary anisotropic correlation C((x - z) / theta) with C(0) = 1.
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern52;
  Eigen::VectorXd lengthscales;

  KernelSpec() = default;
  KernelSpec(KernelFamily fam, Eigen::VectorXd theta);

  [[nodiscard]] Eigen::Index dim() const { return lengthscales.size(); }
};

/// Correlation as a function of the scaled distance r = ||(x - z) / theta||.
double correlation_at_distance(KernelFamily family, double r);

double correlate(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& z);

/// K_n with `nugget` added to the diagonal. Rows of X are points.
Eigen::MatrixXd corr_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                            double nugget);

/// k_n(x): correlations between x and every row of X.
Eigen::VectorXd corr_vector(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& x);

/// n x m block of correlations between rows of X and rows of Z.
Eigen::MatrixXd cross_corr(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::MatrixXd>& Z);

inline constexpr double kDefaultNugget = 1e-8;
inline constexpr double kMaxNugget = 1e-4;

/// Lower Cholesky factor of K_n together with the nugget that made it factorable.
struct CorrFactor {
  Eigen::MatrixXd lower;
  double nugget = 0.0;
};

/// Factors K_n, multiplying the nugget by 10 on failure up to kMaxNugget.
/// A zero nugget is tried once only. Throws ConditioningError.
CorrFactor factor_corr_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                              double nugget = kDefaultNugget);

}  // namespace hei
