#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace hei {

/// Axis-aligned box Omega = [lower, upper].
struct Domain {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Domain() = default;
  Domain(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static Domain unit(int dim);

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Unit cube to domain, row by row.
Eigen::MatrixXd scale(const Eigen::Ref<const Eigen::MatrixXd>& unit_points, const Domain& domain);
Eigen::MatrixXd unscale(const Eigen::Ref<const Eigen::MatrixXd>& points, const Domain& domain);
Eigen::VectorXd scale_point(const Eigen::Ref<const Eigen::VectorXd>& u, const Domain& domain);
Eigen::VectorXd unscale_point(const Eigen::Ref<const Eigen::VectorXd>& x, const Domain& domain);

/// Smallest Euclidean distance between two rows.
double min_pairwise_distance(const Eigen::Ref<const Eigen::MatrixXd>& X);

inline constexpr int kDefaultLhdRestarts = 50;

/// Midpoint Latin hypercube in [0,1]^d, improved by maximin row-swap hill climbing.
/// Each restart uses its own seed derived from `seed`; the best restart wins.
Eigen::MatrixXd maximin_lhd(int n, int d, std::uint64_t seed, int restarts = kDefaultLhdRestarts);

/// Uniform points in the unit cube drawn from a seeded stream.
Eigen::MatrixXd uniform_points(int n, int d, std::uint64_t seed);

}  // namespace hei
