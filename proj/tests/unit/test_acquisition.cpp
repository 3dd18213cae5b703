#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "hei/acquisition.hpp"
#include "hei/errors.hpp"
#include "hei/special.hpp"
#include "test_util.hpp"

using namespace hei;
using test::rel_err;

namespace {

/// E[(I - scale T)_+] with T standard t(df) (df = inf: normal), integrating t * density
/// over the improvement region.
double improvement_oracle(double I, double scale, double df) {
  const auto density = [&](double z) {
    if (std::isinf(df)) return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return boost::math::pdf(boost::math::students_t(df), z);
  };
  // f = loc + scale z; improvement t = I - scale z > 0  <=>  z < I / scale
  const double z0 = I / scale;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double u) { return scale * u * density(z0 - u); }, 0.0,
      std::numeric_limits<double>::infinity(), 15, 1e-14);
}

std::shared_ptr<const GPFit> small_fit(int order, std::uint64_t seed) {
  Rng rng(seed);
  const Dataset data = test::random_dataset(12, 2, rng);
  return std::make_shared<const GPFit>(data, test::matern52(2, 0.4), TrendModel(order, 2));
}

}  // namespace

TEST(Acquisition, EiExamples) {
  EXPECT_NEAR(ei_value(0.0, 1.0), 0.3989422804014327, 1e-15);
  EXPECT_EQ(ei_value(-2.0, 0.0), 0.0);
  EXPECT_EQ(ei_value(1.5, 0.0), 1.5);
}

TEST(Acquisition, HeiExamples) {
  // sqrt(5/3) * t3 density at 0, with Gamma(2) / (sqrt(3 pi) Gamma(3/2)) = 2 / (pi sqrt 3)
  const double want = std::sqrt(5.0 / 3.0) * 2.0 / (std::numbers::pi * std::sqrt(3.0));
  EXPECT_NEAR(hei_value(0.0, 1.0, 5.0), want, 1e-14);
  EXPECT_NEAR(want, 0.474509, 1e-6);
  EXPECT_THROW((void)hei_value(0.0, 1.0, 2.0), DegreesOfFreedomError);
  for (double I = -3.0; I <= 3.0; I += 0.25) {
    for (double s : {0.1, 0.5, 1.0, 3.0}) {
      EXPECT_LE(std::abs(hei_value(I, s, 1e6) - ei_value(I, s)), 1e-4) << I << ' ' << s;
    }
  }
}

TEST(Acquisition, SeiExamples) {
  // (5/4) * t5 density at 0, Gamma(3) / (sqrt(5 pi) Gamma(5/2)) = 8 / (3 pi sqrt 5)
  const double want = 1.25 * 8.0 / (3.0 * std::numbers::pi * std::sqrt(5.0));
  EXPECT_NEAR(sei_value(0.0, 1.0, 5.0), want, 1e-14);
  EXPECT_NEAR(want, 0.4745, 1e-4);
  EXPECT_NEAR(sei_value(0.7, 1.3, 1e7), ei_value(0.7, 1.3), 1e-6);
  EXPECT_THROW((void)sei_value(0.0, 1.0, 1.0), DegreesOfFreedomError);
}

TEST(Acquisition, UcbExamples) {
  EXPECT_EQ(ucb_score(2.0, 0.0, 2.96), -2.0);
  EXPECT_NEAR(ucb_score(1.0, 0.5, 2.96), 0.48, 1e-15);
  EXPECT_GT(ucb_score(1.0, 0.6, 2.96), ucb_score(1.0, 0.5, 2.96));
}

TEST(Acquisition, ClosedFormsMatchQuadrature) {
  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    const double I = rng.uniform(-3.0, 3.0);
    const double s = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
    const double df = rng.uniform(3.0, 50.0);
    EXPECT_LT(rel_err(ei_value(I, s), improvement_oracle(I, s, INFINITY)), 1e-8) << I << ' ' << s;
    const double t_oracle = improvement_oracle(I, s, df);
    EXPECT_LT(rel_err(hei_value(I, s, df), t_oracle), 1e-6) << I << ' ' << s << ' ' << df;
    EXPECT_LT(rel_err(sei_value(I, s, df), t_oracle), 1e-6) << I << ' ' << s << ' ' << df;
  }
}

TEST(Acquisition, HeiAndSeiAgree) {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const double I = rng.uniform(-5.0, 5.0);
    const double s = std::exp(rng.uniform(-3.0, 2.0));
    const double df = rng.uniform(2.1, 200.0);
    EXPECT_NEAR(hei_value(I, s, df), sei_value(I, s, df), 1e-12 * (1.0 + sei_value(I, s, df)));
  }
}

TEST(Acquisition, NonnegativeAndMonotone) {
  for (double s : {0.01, 0.3, 2.0}) {
    double pe = 0.0, ph = 0.0, ps = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double I = -6.0 + 12.0 * k / 99.0;
      const double e = ei_value(I, s);
      const double h = hei_value(I, s, 4.0);
      const double t = sei_value(I, s, 4.0);
      EXPECT_GE(e, 0.0);
      EXPECT_GE(h, 0.0);
      EXPECT_GE(t, 0.0);
      if (k > 0) {
        EXPECT_GE(e, pe);
        EXPECT_GE(h, ph);
        EXPECT_GE(t, ps);
      }
      pe = e;
      ph = h;
      ps = t;
    }
  }
  for (double I : {-2.0, -0.5, 0.0}) {
    double pe = 0.0, ph = 0.0, ps = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double s = 0.01 + 5.0 * k / 99.0;
      EXPECT_GE(ei_value(I, s), pe);
      EXPECT_GE(hei_value(I, s, 6.0), ph);
      EXPECT_GE(sei_value(I, s, 6.0), ps);
      pe = ei_value(I, s);
      ph = hei_value(I, s, 6.0);
      ps = sei_value(I, s, 6.0);
    }
  }
}

TEST(Acquisition, EvaluateAtDesignPointIsZero) {
  Rng rng(43);
  const Dataset data = test::random_dataset(12, 2, rng);
  const auto fit = std::make_shared<const GPFit>(data, test::matern52(2, 0.4), TrendModel(0, 2));
  const AcqState state(fit, HierPrior::weak(0.1), data.y.minCoeff());
  for (const AcqKind kind : {AcqKind::EI_OK, AcqKind::HEI, AcqKind::SEI}) {
    AcqSpec spec;
    spec.kind = kind;
    spec.prior = kind == AcqKind::SEI ? HierPrior::fixed(kSeiA, kSeiB) : HierPrior::weak(0.1);
    for (int i = 0; i < 12; ++i) {
      EXPECT_LE(evaluate(state, spec, data.X.row(i).transpose()), 1e-8);
    }
  }
}

TEST(Acquisition, EiOkEqualsEiUkAtOrderZero) {
  const auto fit = small_fit(0, 44);
  const AcqState state(fit, HierPrior::weak(0.1), 0.2);
  AcqSpec ok;
  ok.kind = AcqKind::EI_OK;
  AcqSpec uk;
  uk.kind = AcqKind::EI_UK;
  Rng rng(45);
  for (int m = 0; m < 50; ++m) {
    const Eigen::Vector2d x(rng.uniform(), rng.uniform());
    EXPECT_EQ(evaluate(state, ok, x), evaluate(state, uk, x));
  }
}

TEST(Acquisition, HeiApproachesEiForVagueLargeSamplePrior) {
  Rng rng(46);
  const Dataset data = test::random_dataset(400, 1, rng);
  const auto fit = std::make_shared<const GPFit>(data, test::matern52(1, 0.02), TrendModel(0, 1));
  // a = q/2 with b -> 0 reproduces sigma_hat^2 up to the n/(n - q + 2a) factor
  const AcqState state(fit, HierPrior::fixed(0.5, 1e-12), data.y.minCoeff() + 0.01);
  AcqSpec hei;
  hei.kind = AcqKind::HEI;
  AcqSpec ei;
  ei.kind = AcqKind::EI_UK;
  for (double x = 0.001; x < 1.0; x += 0.0371) {
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, x);
    const double e = evaluate(state, ei, p);
    EXPECT_NEAR(evaluate(state, hei, p), e, 1e-2 * e + 1e-9);
  }
}

TEST(Acquisition, BatchMatchesPointwise) {
  const auto fit = small_fit(1, 47);
  const AcqState state(fit, HierPrior::fixed(1.0, 0.5), -0.3);
  Rng rng(48);
  const Eigen::MatrixXd Z = test::random_points(30, 2, rng);
  for (const AcqKind kind : {AcqKind::EI_UK, AcqKind::HEI, AcqKind::SEI, AcqKind::UCB}) {
    AcqSpec spec;
    spec.kind = kind;
    spec.prior = HierPrior::fixed(1.0, 0.5);
    const BatchValues b = evaluate_batch(state, spec, Z);
    for (int m = 0; m < 30; ++m) {
      EXPECT_NEAR(b.value[m], evaluate(state, spec, Z.row(m).transpose()), 1e-11);
      EXPECT_NEAR(b.s[m], std::sqrt(fit->predict_s2(Z.row(m).transpose())), 1e-11);
    }
  }
}

TEST(Acquisition, SpecValidation) {
  AcqSpec s;
  s.epsilon = 1.0;
  EXPECT_THROW(s.validate(), ArgumentError);
  s.epsilon = 0.1;
  s.gamma = 1.5;
  EXPECT_THROW(s.validate(), ArgumentError);
  s.gamma = 0.2;
  EXPECT_NO_THROW(s.validate());
  EXPECT_TRUE(s.epsilon_greedy());
  EXPECT_TRUE(s.stabilized());
  s.kind = AcqKind::UCB;
  s.ucb_mult = 0.0;
  EXPECT_THROW(s.validate(), ArgumentError);
}
