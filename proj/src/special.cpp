#include "hei/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hei/errors.hpp"

namespace hei::special {

double log_gamma(double x) {
  if (!(x > 0.0)) throw ArgumentError("log_gamma: argument must be positive");
  return boost::math::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw ArgumentError("digamma: argument must be positive");
  return boost::math::digamma(x);
}

double incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  // Work from the smaller of x and y so the complement never cancels.
  return x <= 0.5 ? boost::math::ibeta(a, b, x) : boost::math::ibetac(b, a, y);
}

double incomplete_beta(double a, double b, double x) {
  return incomplete_beta(a, b, x, 1.0 - x);
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double t_pdf(double df, double x) {
  if (!(df > 0.0)) throw ArgumentError("t_pdf: degrees of freedom must be positive");
  if (!std::isfinite(x)) return std::isnan(x) ? x : 0.0;
  return boost::math::pdf(boost::math::students_t(df), x);
}

double t_cdf(double df, double x) {
  if (!(df > 0.0)) throw ArgumentError("t_cdf: degrees of freedom must be positive");
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t(df), x);
}

}  // namespace hei::special
