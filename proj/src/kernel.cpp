#include "hei/kernel.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "hei/errors.hpp"

namespace hei {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt5 = 2.2360679774997896964;

// Smallest admissible squared pivot of the Cholesky factor. Any matrix with
// nugget >= 1e-8 has all pivots >= 1e-8, so this only rejects matrices that are
// singular up to rounding.
constexpr double kMinPivot = 1e-13;

void check_dims(const KernelSpec& spec, Eigen::Index cols, const char* what) {
  if (cols != spec.dim()) {
    std::ostringstream msg;
    msg << what << ": dimension " << cols << " does not match kernel dimension " << spec.dim();
    throw ArgumentError(msg.str());
  }
}

// Squared scaled distance, summed in coordinate order so that the result is
// bit-for-bit symmetric in (x, z).
template <typename A, typename B>
double scaled_sq_distance(const A& x, const B& z, const Eigen::VectorXd& theta) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double t = (x[j] - z[j]) / theta[j];
    acc += t * t;
  }
  return acc;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern12: return "matern12";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
    case KernelFamily::SquaredExponential: return "sqexp";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "matern12") return KernelFamily::Matern12;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  if (name == "sqexp" || name == "gaussian") return KernelFamily::SquaredExponential;
  throw ArgumentError("unknown kernel family '" + std::string(name) + "'");
}

KernelSpec::KernelSpec(KernelFamily fam, Eigen::VectorXd theta)
    : family(fam), lengthscales(std::move(theta)) {
  if (lengthscales.size() == 0) throw ArgumentError("KernelSpec: empty length-scale vector");
  for (Eigen::Index j = 0; j < lengthscales.size(); ++j) {
    if (!(lengthscales[j] > 0.0) || !std::isfinite(lengthscales[j])) {
      throw ArgumentError("KernelSpec: length-scales must be positive and finite");
    }
  }
}

double correlation_at_distance(KernelFamily family, double r) {
  switch (family) {
    case KernelFamily::Matern12:
      return std::exp(-r);
    case KernelFamily::Matern32: {
      const double s = kSqrt3 * r;
      return (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::Matern52: {
      const double s = kSqrt5 * r;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
    case KernelFamily::SquaredExponential:
      return std::exp(-0.5 * r * r);
  }
  return 0.0;
}

double correlate(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& z) {
  check_dims(spec, x.size(), "correlate");
  check_dims(spec, z.size(), "correlate");
  return correlation_at_distance(spec.family,
                                 std::sqrt(scaled_sq_distance(x, z, spec.lengthscales)));
}

Eigen::MatrixXd corr_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                            double nugget) {
  const Eigen::Index n = X.rows();
  if (n > 0) check_dims(spec, X.cols(), "corr_matrix");
  if (nugget < 0.0) throw ArgumentError("corr_matrix: nugget must be nonnegative");
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0 + nugget;
    for (Eigen::Index k = 0; k < i; ++k) {
      const double r = std::sqrt(scaled_sq_distance(X.row(i), X.row(k), spec.lengthscales));
      K(i, k) = K(k, i) = correlation_at_distance(spec.family, r);
    }
  }
  return K;
}

Eigen::VectorXd corr_vector(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dims(spec, x.size(), "corr_vector");
  const Eigen::Index n = X.rows();
  if (n > 0) check_dims(spec, X.cols(), "corr_vector");
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k[i] = correlation_at_distance(spec.family,
                                   std::sqrt(scaled_sq_distance(X.row(i), x, spec.lengthscales)));
  }
  return k;
}

Eigen::MatrixXd cross_corr(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  if (X.rows() > 0) check_dims(spec, X.cols(), "cross_corr");
  if (Z.rows() > 0) check_dims(spec, Z.cols(), "cross_corr");
  Eigen::MatrixXd C(X.rows(), Z.rows());
  for (Eigen::Index m = 0; m < Z.rows(); ++m) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      C(i, m) = correlation_at_distance(
          spec.family, std::sqrt(scaled_sq_distance(X.row(i), Z.row(m), spec.lengthscales)));
    }
  }
  return C;
}

CorrFactor factor_corr_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                              double nugget) {
  if (nugget < 0.0) throw ArgumentError("factor_corr_matrix: nugget must be nonnegative");
  Eigen::MatrixXd K = corr_matrix(spec, X, 0.0);
  const Eigen::Index n = K.rows();
  double tried = nugget;
  while (true) {
    Eigen::MatrixXd Kn = K;
    Kn.diagonal().array() += tried;
    Eigen::LLT<Eigen::MatrixXd> llt(Kn);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd L = llt.matrixL();
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double p = L(i, i);
        if (!(p * p > kMinPivot)) {
          ok = false;
          break;
        }
      }
      if (ok) return CorrFactor{std::move(L), tried};
    }
    const double next = tried * 10.0;
    if (tried == 0.0 || next > kMaxNugget * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "correlation matrix not factorable (n = " << n << ", final nugget = " << tried << ")";
      throw ConditioningError(msg.str(), tried);
    }
    tried = next;
  }
}

}  // namespace hei
