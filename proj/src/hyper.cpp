#include "hei/hyper.hpp"

#include <array>
#include <cmath>

#include "hei/errors.hpp"
#include "hei/special.hpp"

namespace hei {

namespace {

constexpr int kGridPoints = 32;

void check_ab(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ArgumentError("hyperparameters a and b must be positive and finite");
  }
}

double half_dof(const FitStats& s) {
  if (s.n <= s.q) throw InsufficientDataError("marginal likelihood needs n > q");
  return 0.5 * static_cast<double>(s.n - s.q);
}

}  // namespace

void HyperConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("weak prior epsilon must be positive");
  if (!(zeta > 0.0) || !(iota > 0.0)) throw ConfigError("zeta and iota must be positive");
  if (!(a_lo > 0.0) || !(a_lo < a_hi) || !std::isfinite(a_hi)) {
    throw ConfigError("need 0 < a_lo < a_hi < infinity");
  }
}

double log_marginal(const FitStats& stats, double a, double b) {
  check_ab(a, b);
  const double m = half_dof(stats);
  return -0.5 * (stats.log_det_G + stats.log_det_K) - m * std::log(2.0 * special::kPi) +
         a * std::log(b) - special::log_gamma(a) + special::log_gamma(a + m) -
         (a + m) * std::log(b + stats.w);
}

MarginalGradient log_marginal_gradient(const FitStats& stats, double a, double b) {
  check_ab(a, b);
  const double m = half_dof(stats);
  MarginalGradient g;
  g.da = std::log(b) - special::digamma(a) + special::digamma(a + m) - std::log(b + stats.w);
  g.db = a / b - (a + m) / (b + stats.w);
  return g;
}

double profile_b(double a, double w, int n, int q) {
  if (!(a > 0.0)) throw ArgumentError("profile_b: a must be positive");
  if (n <= q) throw InsufficientDataError("profile_b: need n > q");
  if (!(w > 0.0)) throw DegenerateFitError("profile_b: residual quadratic form is zero");
  return 2.0 * a * w / static_cast<double>(n - q);
}

double mmap_objective(const FitStats& stats, double a, double zeta, double iota) {
  const double b = profile_b(a, stats.w, stats.n, stats.q);
  return log_marginal(stats, a, b) + (zeta - 1.0) * std::log(a) - iota * a;
}

double mmap_derivative(const FitStats& stats, double a, double zeta, double iota) {
  if (!(a > 0.0)) throw ArgumentError("mmap_derivative: a must be positive");
  if (!(stats.w > 0.0)) throw DegenerateFitError("mmap_derivative: residual quadratic form is zero");
  const double m = half_dof(stats);
  return special::digamma(a + m) - special::digamma(a) - std::log1p(m / a) + (zeta - 1.0) / a -
         iota;
}

MmapResult mmap_estimate(const FitStats& stats, double zeta, double iota, double a_lo,
                         double a_hi) {
  if (!(a_lo > 0.0) || !(a_lo < a_hi)) throw ArgumentError("mmap_estimate: need 0 < a_lo < a_hi");
  if (!(zeta > 0.0) || !(iota > 0.0)) throw ArgumentError("mmap_estimate: zeta, iota must be positive");
  const auto deriv = [&](double a) { return mmap_derivative(stats, a, zeta, iota); };

  MmapResult out;
  const auto finish = [&](double a) {
    out.a = a;
    out.b = profile_b(a, stats.w, stats.n, stats.q);
    return out;
  };

  if (deriv(a_lo) < 0.0) {
    out.at_lower = true;
    return finish(a_lo);
  }
  if (deriv(a_hi) > 0.0) {
    out.at_upper = true;
    return finish(a_hi);
  }

  std::array<double, kGridPoints> grid{};
  const double log_lo = std::log(a_lo);
  const double step = (std::log(a_hi) - log_lo) / (kGridPoints - 1);
  for (int i = 0; i < kGridPoints; ++i) grid[i] = std::exp(log_lo + step * i);
  grid.front() = a_lo;
  grid.back() = a_hi;

  double lo = a_lo;
  double hi = a_hi;
  for (int i = 1; i < kGridPoints; ++i) {
    if (deriv(grid[i]) <= 0.0) {
      lo = grid[i - 1];
      hi = grid[i];
      break;
    }
  }

  double d_lo = deriv(lo);
  double d_hi = deriv(hi);
  // Bisect until the bracket cannot shrink any further in double precision.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double d_mid = deriv(mid);
    if (d_mid == 0.0) {
      lo = hi = mid;
      d_lo = d_hi = 0.0;
      break;
    }
    if (d_mid > 0.0) {
      lo = mid;
      d_lo = d_mid;
    } else {
      hi = mid;
      d_hi = d_mid;
    }
    if (hi - lo <= 1e-10 * lo && std::fabs(d_lo) <= 1e-9 && std::fabs(d_hi) <= 1e-9) break;
  }
  return finish(std::fabs(d_lo) <= std::fabs(d_hi) ? lo : hi);
}

DsdResult dsd_estimate(const FitStats& stats, int n_ini, double zeta, double iota, double a_lo,
                       double a_hi) {
  if (n_ini < 1) throw ArgumentError("dsd_estimate: n_ini must be positive");
  const MmapResult m = mmap_estimate(stats, zeta, iota, a_lo, a_hi);
  DsdResult out;
  out.a = m.a;
  out.kappa = m.b / static_cast<double>(n_ini);
  out.at_lower = m.at_lower;
  out.at_upper = m.at_upper;
  return out;
}

PriorEstimate estimate_prior(const HyperConfig& config, const GPFit& fit) {
  config.validate();
  PriorEstimate est;
  if (config.scheme == PriorScheme::Weak) {
    est.prior = HierPrior::weak(config.epsilon);
    return est;
  }
  if (fit.degenerate()) {
    est.prior = HierPrior::weak(config.epsilon);
    est.warning = "degenerate initial fit; using the weak prior";
    return est;
  }
  const FitStats stats = fit.stats();
  if (config.scheme == PriorScheme::MMAP) {
    const MmapResult m = mmap_estimate(stats, config.zeta, config.iota, config.a_lo, config.a_hi);
    est.prior = HierPrior::fixed(m.a, m.b, PriorScheme::MMAP);
    if (m.at_upper) est.warning = "MMAP estimate of a hit the upper search bound";
    return est;
  }
  const DsdResult r =
      dsd_estimate(stats, fit.n(), config.zeta, config.iota, config.a_lo, config.a_hi);
  est.prior = HierPrior::dsd(r.a, r.kappa, static_cast<std::size_t>(fit.n()));
  if (r.at_upper) est.warning = "DSD estimate of a hit the upper search bound";
  return est;
}

}  // namespace hei
