#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <gtest/gtest.h>

#include "hei/errors.hpp"
#include "hei/gp.hpp"
#include "test_util.hpp"

using namespace hei;

namespace {

Dataset two_point(double y0, double y1) {
  Eigen::MatrixXd X(2, 1);
  X << 0.2, 0.6;
  return Dataset(X, Eigen::Vector2d(y0, y1));
}

}  // namespace

TEST(Dataset, ValidatesShapes) {
  EXPECT_THROW(Dataset(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(2)), ArgumentError);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(1, 2);
  X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Dataset(X, Eigen::VectorXd::Zero(1)), ArgumentError);
  Dataset d(Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1));
  d.append(Eigen::Vector2d(0.5, 0.5), 2.0);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_THROW(d.append(Eigen::Vector3d::Zero(), 1.0), ArgumentError);
}

TEST(GPFit, ConstantPairIsFitExactly) {
  const GPFit fit(two_point(2.5, 2.5), test::matern52(1, 0.5), TrendModel(0, 1));
  EXPECT_NEAR(fit.beta_hat()[0], 2.5, 1e-12);
  EXPECT_NEAR(fit.sigma2_hat(), 0.0, 1e-20);
  EXPECT_TRUE(fit.degenerate());
  EXPECT_EQ(fit.profile_loglik(), -std::numeric_limits<double>::infinity());
}

TEST(GPFit, OrderZeroBetaIsGls) {
  const Dataset data = two_point(1.0, 4.0);
  const KernelSpec k = test::matern52(1, 0.5);
  const GPFit fit(data, k, TrendModel(0, 1), 0.0);
  // explicit 2x2 inverse
  const double rho = correlate(k, data.X.row(0).transpose(), data.X.row(1).transpose());
  const double det = 1.0 - rho * rho;
  const Eigen::Matrix2d Kinv = (Eigen::Matrix2d() << 1.0, -rho, -rho, 1.0).finished() / det;
  const Eigen::Vector2d one = Eigen::Vector2d::Ones();
  const double want = one.dot(Kinv * data.y) / one.dot(Kinv * one);
  EXPECT_NEAR(fit.beta_hat()[0], want, 1e-12);
  EXPECT_NEAR(fit.beta_hat()[0], 2.5, 1e-12);  // symmetric pair
}

TEST(GPFit, ShiftEquivariance) {
  Rng rng(5);
  Dataset data = test::random_dataset(12, 2, rng);
  const KernelSpec k = test::matern52(2, 0.4);
  const GPFit a(data, k, TrendModel(0, 2));
  data.y.array() += 7.5;
  const GPFit b(data, k, TrendModel(0, 2));
  EXPECT_NEAR(b.beta_hat()[0] - a.beta_hat()[0], 7.5, 1e-9);
  EXPECT_NEAR(b.sigma2_hat(), a.sigma2_hat(), 1e-9 * a.sigma2_hat());
}

TEST(GPFit, Interpolates) {
  for (int order : {0, 1, 2}) {
    Rng rng(6 + order);
    const Dataset data = test::random_dataset(20, 2, rng);
    const GPFit fit(data, test::matern52(2, 0.3), TrendModel(order, 2));
    const double range = data.y.maxCoeff() - data.y.minCoeff();
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd x = data.X.row(i).transpose();
      EXPECT_NEAR(fit.predict_mean(x), data.y[i], 1e-6 * range);
      EXPECT_LE(fit.predict_s2(x), 1e-6);
    }
  }
}

TEST(GPFit, RevertsToTrendFarAway) {
  Rng rng(7);
  const Dataset data = test::random_dataset(10, 1, rng);
  const GPFit fit(data, test::matern52(1, 0.01), TrendModel(1, 1));
  const Eigen::VectorXd far = Eigen::VectorXd::Constant(1, 50.0);
  EXPECT_NEAR(fit.predict_mean(far), fit.beta_hat()[0] + 50.0 * fit.beta_hat()[1], 1e-9);
}

TEST(GPFit, SinglePointOrderZero) {
  const Dataset data(Eigen::MatrixXd::Constant(1, 2, 0.3), Eigen::VectorXd::Constant(1, 3.0));
  const GPFit fit(data, test::matern52(2, 0.5), TrendModel(0, 2));
  for (double t : {0.0, 0.3, 0.9}) EXPECT_NEAR(fit.predict_mean(Eigen::Vector2d(t, 1 - t)), 3.0, 1e-12);
}

TEST(GPFit, FarVarianceOrderZero) {
  const Dataset data = two_point(1.0, 4.0);
  const KernelSpec k = test::matern52(1, 0.5);
  const GPFit fit(data, k, TrendModel(0, 1));
  const Eigen::MatrixXd K = corr_matrix(k, data.X, fit.nugget());
  const double one_Kinv_one = Eigen::Vector2d::Ones().dot(K.ldlt().solve(Eigen::Vector2d::Ones()));
  const double s2 = fit.predict_s2(Eigen::VectorXd::Constant(1, 40.0));
  EXPECT_NEAR(s2, 1.0 + 1.0 / one_Kinv_one, 1e-12);
  EXPECT_GT(s2, 1.0);
}

TEST(GPFit, VarianceDominatesNoTrendVariance) {
  for (int order : {0, 1, 2}) {
    Rng rng(20 + order);
    const Dataset data = test::random_dataset(15, 2, rng);
    const GPFit fit(data, test::matern52(2, 0.3), TrendModel(order, 2));
    for (int m = 0; m < 500; ++m) {
      const Eigen::Vector2d x(rng.uniform(), rng.uniform());
      EXPECT_GE(fit.predict_s2(x), fit.predict_s2_no_trend(x) - 1e-12);
    }
  }
}

TEST(GPFit, BatchMatchesPointwise) {
  Rng rng(9);
  const Dataset data = test::random_dataset(25, 3, rng);
  const GPFit fit(data, KernelSpec(KernelFamily::Matern32, Eigen::Vector3d(0.3, 0.5, 0.8)),
                  TrendModel(1, 3));
  const Eigen::MatrixXd Z = test::random_points(40, 3, rng);
  const auto batch = fit.predict_batch(Z);
  for (int m = 0; m < 40; ++m) {
    const auto p = fit.predict(Z.row(m).transpose());
    EXPECT_NEAR(batch.mean[m], p.mean, 1e-11);
    EXPECT_NEAR(batch.s2[m], p.s2, 1e-11);
  }
}

TEST(GPFit, MatchesDenseFormulas) {
  Rng rng(10);
  const Dataset data = test::random_dataset(9, 2, rng);
  const KernelSpec k = test::matern52(2, 0.6);
  const TrendModel t(1, 2);
  const GPFit fit(data, k, t);
  const Eigen::MatrixXd K = corr_matrix(k, data.X, fit.nugget());
  const Eigen::MatrixXd Kinv = K.inverse();
  const Eigen::MatrixXd P = t.design_matrix(data.X);
  const Eigen::MatrixXd G = P.transpose() * Kinv * P;
  const Eigen::VectorXd beta = G.ldlt().solve(P.transpose() * Kinv * data.y);
  EXPECT_TRUE(fit.beta_hat().isApprox(beta, 1e-8));
  const Eigen::VectorXd r = data.y - P * beta;
  EXPECT_NEAR(fit.sigma2_hat(), r.dot(Kinv * r) / 9.0, 1e-8 * fit.sigma2_hat());
  EXPECT_NEAR(fit.log_det_K(), std::log(K.determinant()), 1e-8);
  EXPECT_NEAR(fit.log_det_G(), std::log(G.determinant()), 1e-8);
  const Eigen::Vector2d x(0.37, 0.81);
  const Eigen::VectorXd kx = corr_vector(k, data.X, x);
  const Eigen::VectorXd px = t.eval(x);
  const Eigen::VectorXd h = px - P.transpose() * Kinv * kx;
  const double s2 = 1.0 - kx.dot(Kinv * kx) + h.dot(G.ldlt().solve(h));
  EXPECT_NEAR(fit.predict_s2(x), s2, 1e-9);
  EXPECT_NEAR(fit.predict_mean(x), px.dot(beta) + kx.dot(Kinv * r), 1e-9);
}

TEST(GPFit, ErrorsOnTooFewPoints) {
  Rng rng(11);
  const Dataset data = test::random_dataset(3, 2, rng);
  EXPECT_THROW(GPFit(data, test::matern52(2, 0.5), TrendModel(2, 2)), InsufficientDataError);
  // n = q interpolates with the trend alone
  const GPFit exact(data, test::matern52(2, 0.5), TrendModel(1, 2));
  EXPECT_TRUE(exact.degenerate());
  EXPECT_EQ(exact.profile_loglik(), -INFINITY);
  EXPECT_THROW(GPFit(data, test::matern52(3, 0.5), TrendModel(0, 2)), ArgumentError);
}

TEST(ProfileLoglik, PermutationInvariant) {
  Rng rng(12);
  const Dataset data = test::random_dataset(14, 2, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(14);
  perm.setIdentity();
  std::reverse(perm.indices().data(), perm.indices().data() + 14);
  std::swap(perm.indices()[2], perm.indices()[9]);
  const Dataset shuffled(perm * data.X, perm * data.y);
  const KernelSpec k = test::matern52(2, 0.35);
  EXPECT_NEAR(profile_loglik(data, k, TrendModel(1, 2)), profile_loglik(shuffled, k, TrendModel(1, 2)),
              1e-10);
}

TEST(ProfileLoglik, DegenerateIsMinusInfinity) {
  Rng rng(13);
  const Dataset data = test::random_dataset(6, 1, rng, [](const auto&) { return -2.0; });
  EXPECT_EQ(profile_loglik(data, test::matern52(1, 0.5), TrendModel(0, 1)),
            -std::numeric_limits<double>::infinity());
}

TEST(ProfileLoglik, MatchesDirectMaximization) {
  Eigen::MatrixXd X(3, 1);
  X << 0.1, 0.45, 0.9;
  const Eigen::Vector3d y(0.4, -1.2, 2.0);
  const KernelSpec k = test::matern52(1, 0.3);
  const Eigen::MatrixXd K = corr_matrix(k, X, kDefaultNugget);
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  const double logdet = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  const auto loglik = [&](double beta, double s2) {
    const Eigen::Vector3d r = y - beta * Eigen::Vector3d::Ones();
    return -1.5 * std::log(2.0 * std::numbers::pi * s2) - 0.5 * logdet -
           0.5 * r.dot(llt.solve(r)) / s2;
  };
  const auto best_over_s2 = [&](double beta) {
    const auto r = boost::math::tools::brent_find_minima(
        [&](double s2) { return -loglik(beta, s2); }, 1e-6, 10.0, 60);
    return r.second;
  };
  const auto best = boost::math::tools::brent_find_minima(best_over_s2, -5.0, 5.0, 60);
  const double oracle = -best.second;
  const double got = profile_loglik(Dataset(X, y), k, TrendModel(0, 1));
  EXPECT_NEAR(got, oracle, 1e-4 * std::abs(oracle));
}

TEST(HierPrior, Factories) {
  const HierPrior w = HierPrior::weak(0.1);
  EXPECT_EQ(w.a, 0.1);
  EXPECT_EQ(w.b, 0.1);
  const HierPrior d = HierPrior::dsd(1.5, 0.25, 40);
  EXPECT_EQ(d.b, 10.0);
  EXPECT_EQ(d.at_sample_size(60).b, 15.0);
  EXPECT_EQ(w.at_sample_size(60).b, 0.1);
  EXPECT_THROW((void)HierPrior::weak(0.0), ArgumentError);
  EXPECT_THROW((void)HierPrior::fixed(1.0, -1.0), ArgumentError);
}

TEST(Hierarchical, PosteriorVarianceIdentity) {
  Rng rng(14);
  const Dataset data = test::random_dataset(12, 2, rng);
  const GPFit fit(data, test::matern52(2, 0.4), TrendModel(1, 2));
  const double n = 12.0;
  const double q = 3.0;
  for (const auto& [a, b] : {std::pair{0.5, 0.01}, {2.0, 3.0}, {1.5, 1e-8}}) {
    const HierPrior p = HierPrior::fixed(a, b);
    const double want = (2.0 * b + n * fit.sigma2_hat()) / (2.0 * a + n - q);
    EXPECT_NEAR(posterior_sigma2(fit, p), want, 1e-14 * want);
    const PredictiveT t = hierarchical_posterior(fit, p, Eigen::Vector2d(0.3, 0.3));
    EXPECT_DOUBLE_EQ(t.df, 2.0 * a + n - q);
    // a < q/2 inflates the variance above the MLE
    if (a < q / 2.0) {
      EXPECT_GT(posterior_sigma2(fit, p), fit.sigma2_hat());
    }
  }
}

TEST(Hierarchical, LargeSampleLimit) {
  // white-noise responses keep sigma2_hat of order one as n grows
  const HierPrior p = HierPrior::fixed(1.0, 1.0);
  double prev = INFINITY;
  for (int n : {100, 400, 1600}) {
    Rng rng(15);
    const Dataset data = test::random_dataset(n, 2, rng, [&](const auto&) { return rng.uniform(); });
    const GPFit fit(data, test::matern52(2, 1e-5), TrendModel(0, 2));
    const double dev = std::abs(posterior_sigma2(fit, p) / fit.sigma2_hat() - 1.0);
    EXPECT_LT(dev, prev) << n;
    prev = dev;
    EXPECT_GT(hierarchical_posterior(fit, p, Eigen::Vector2d(0.5, 0.5)).df, n);
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Hierarchical, RejectsLowDegreesOfFreedom) {
  Rng rng(16);
  const Dataset data = test::random_dataset(4, 2, rng);
  const GPFit fit(data, test::matern52(2, 0.5), TrendModel(1, 2));
  // df = 2a + 4 - 3 <= 2 for a = 0.4
  EXPECT_THROW((void)hierarchical_posterior(fit, HierPrior::fixed(0.4, 1.0), Eigen::Vector2d(0.5, 0.5)),
               DegreesOfFreedomError);
}

TEST(PredictiveT, PdfIntegratesToCdf) {
  const PredictiveT t{5.0, 1.0, 2.0};
  EXPECT_NEAR(t.cdf(1.0), 0.5, 1e-15);
  const double h = 1e-5;
  for (double f : {-3.0, 0.5, 4.0}) {
    EXPECT_NEAR((t.cdf(f + h) - t.cdf(f - h)) / (2 * h), t.pdf(f), 1e-8);
  }
}
