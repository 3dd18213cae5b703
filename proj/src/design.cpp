#include "hei/design.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hei/errors.hpp"
#include "hei/rng.hpp"

namespace hei {

Domain::Domain(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ArgumentError("Domain: bounds must be nonempty and of equal length");
  }
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || !(lower[j] < upper[j])) {
      throw ArgumentError("Domain: need finite lower < upper in every coordinate");
    }
  }
}

Domain Domain::unit(int dim) {
  if (dim < 1) throw ArgumentError("Domain::unit: dimension must be positive");
  return Domain(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

bool Domain::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
  }
  return true;
}

Eigen::VectorXd scale_point(const Eigen::Ref<const Eigen::VectorXd>& u, const Domain& domain) {
  if (u.size() != domain.lower.size()) throw ArgumentError("scale_point: dimension mismatch");
  return domain.lower.array() + u.array() * (domain.upper - domain.lower).array();
}

Eigen::VectorXd unscale_point(const Eigen::Ref<const Eigen::VectorXd>& x, const Domain& domain) {
  if (x.size() != domain.lower.size()) throw ArgumentError("unscale_point: dimension mismatch");
  return (x - domain.lower).array() / (domain.upper - domain.lower).array();
}

Eigen::MatrixXd scale(const Eigen::Ref<const Eigen::MatrixXd>& unit_points, const Domain& domain) {
  Eigen::MatrixXd out(unit_points.rows(), unit_points.cols());
  for (Eigen::Index i = 0; i < unit_points.rows(); ++i) {
    out.row(i) = scale_point(unit_points.row(i).transpose(), domain).transpose();
  }
  return out;
}

Eigen::MatrixXd unscale(const Eigen::Ref<const Eigen::MatrixXd>& points, const Domain& domain) {
  Eigen::MatrixXd out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.row(i) = unscale_point(points.row(i).transpose(), domain).transpose();
  }
  return out;
}

double min_pairwise_distance(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index k = 0; k < i; ++k) best = std::min(best, (X.row(i) - X.row(k)).squaredNorm());
  }
  return std::sqrt(best);
}

namespace {

// One restart: random midpoint LHD, then swap hill climbing on the critical pair.
class LhdClimber {
 public:
  LhdClimber(int n, int d, std::uint64_t seed) : n_(n), d_(d), rng_(seed), X_(n, d), D_(n, n) {
    std::vector<int> perm(n);
    for (int j = 0; j < d; ++j) {
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = n - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng_.below(static_cast<std::uint64_t>(i) + 1)]);
      }
      for (int i = 0; i < n; ++i) X_(i, j) = (perm[i] + 0.5) / n;
    }
    for (int i = 0; i < n; ++i) {
      D_(i, i) = std::numeric_limits<double>::infinity();
      for (int k = 0; k < i; ++k) D_(i, k) = D_(k, i) = sq_dist(i, k);
    }
    nn_dist_.resize(n);
    nn_idx_.resize(n);
    for (int i = 0; i < n; ++i) refresh_nn(i, D_, nn_dist_, nn_idx_);
  }

  void climb(long long swaps) {
    Eigen::VectorXd row_i(n_), row_j(n_);
    std::vector<double> cand_dist;
    std::vector<int> cand_idx;
    for (long long s = 0; s < swaps; ++s) {
      const int c = critical_row();
      const int i = rng_.below(2) == 0 ? c : nn_idx_[c];
      int j = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n_ - 1)));
      if (j >= i) ++j;
      const int col = static_cast<int>(rng_.below(static_cast<std::uint64_t>(d_)));
      const double old_min = nn_dist_[c];

      std::swap(X_(i, col), X_(j, col));
      for (int k = 0; k < n_; ++k) {
        row_i[k] = (k == i) ? std::numeric_limits<double>::infinity() : sq_dist(i, k);
        row_j[k] = (k == j) ? std::numeric_limits<double>::infinity() : sq_dist(j, k);
      }
      cand_dist = nn_dist_;
      cand_idx = nn_idx_;
      double new_min = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n_; ++k) {
        if (k == i || k == j) continue;
        if (cand_idx[k] == i || cand_idx[k] == j) {
          double best = std::numeric_limits<double>::infinity();
          int arg = -1;
          for (int m = 0; m < n_; ++m) {
            const double v = m == i ? row_i[k] : (m == j ? row_j[k] : D_(k, m));
            if (v < best) {
              best = v;
              arg = m;
            }
          }
          cand_dist[k] = best;
          cand_idx[k] = arg;
        } else {
          if (row_i[k] < cand_dist[k]) {
            cand_dist[k] = row_i[k];
            cand_idx[k] = i;
          }
          if (row_j[k] < cand_dist[k]) {
            cand_dist[k] = row_j[k];
            cand_idx[k] = j;
          }
        }
        new_min = std::min(new_min, cand_dist[k]);
      }
      for (const int r : {i, j}) {
        const Eigen::VectorXd& row = r == i ? row_i : row_j;
        Eigen::Index arg = 0;
        cand_dist[r] = row.minCoeff(&arg);
        cand_idx[r] = static_cast<int>(arg);
        new_min = std::min(new_min, cand_dist[r]);
      }

      if (new_min >= old_min) {
        D_.row(i) = row_i.transpose();
        D_.col(i) = row_i;
        D_.row(j) = row_j.transpose();
        D_.col(j) = row_j;
        nn_dist_.swap(cand_dist);
        nn_idx_.swap(cand_idx);
      } else {
        std::swap(X_(i, col), X_(j, col));
      }
    }
  }

  [[nodiscard]] double min_sq_distance() const {
    return nn_dist_[static_cast<std::size_t>(critical_row())];
  }
  [[nodiscard]] const Eigen::MatrixXd& points() const { return X_; }

 private:
  double sq_dist(int a, int b) const {
    double acc = 0.0;
    for (int j = 0; j < d_; ++j) {
      const double t = X_(a, j) - X_(b, j);
      acc += t * t;
    }
    return acc;
  }

  void refresh_nn(int i, const Eigen::MatrixXd& D, std::vector<double>& dist,
                  std::vector<int>& idx) const {
    Eigen::Index arg = 0;
    dist[i] = D.row(i).minCoeff(&arg);
    idx[i] = static_cast<int>(arg);
  }

  int critical_row() const {
    int best = 0;
    for (int k = 1; k < n_; ++k) {
      if (nn_dist_[k] < nn_dist_[best]) best = k;
    }
    return best;
  }

  int n_;
  int d_;
  Rng rng_;
  Eigen::MatrixXd X_;
  Eigen::MatrixXd D_;  // squared distances, +inf on the diagonal
  std::vector<double> nn_dist_;
  std::vector<int> nn_idx_;
};

}  // namespace

Eigen::MatrixXd maximin_lhd(int n, int d, std::uint64_t seed, int restarts) {
  if (n < 2 || d < 1) throw ArgumentError("maximin_lhd: need n >= 2 and d >= 1");
  if (restarts < 1) throw ArgumentError("maximin_lhd: need at least one restart");
  const long long swaps = 10LL * n * n;
  Eigen::MatrixXd best;
  double best_min = -1.0;
  for (int r = 0; r < restarts; ++r) {
    LhdClimber climber(n, d, derive_seed(seed, static_cast<std::uint64_t>(r)));
    climber.climb(swaps);
    if (climber.min_sq_distance() > best_min) {
      best_min = climber.min_sq_distance();
      best = climber.points();
    }
  }
  return best;
}

Eigen::MatrixXd uniform_points(int n, int d, std::uint64_t seed) {
  if (n < 0 || d < 1) throw ArgumentError("uniform_points: need n >= 0 and d >= 1");
  Rng rng(seed);
  Eigen::MatrixXd U(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) U(i, j) = rng.uniform();
  }
  return U;
}

}  // namespace hei
