#pragma once

// Scalar special functions used by the acquisition and hyperparameter code.
// Thin wrappers over Boost.Math with argument checks.

namespace hei::special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Digamma function psi(x) for x > 0.
double digamma(double x);

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately avoids cancellation when x is close to one.
double incomplete_beta(double a, double b, double x, double y);
double incomplete_beta(double a, double b, double x);

double normal_pdf(double x);
double normal_cdf(double x);

/// Standard Student-t density with `df` degrees of freedom.
double t_pdf(double df, double x);
/// Standard Student-t distribution function, via the incomplete beta function.
double t_cdf(double df, double x);

}  // namespace hei::special
