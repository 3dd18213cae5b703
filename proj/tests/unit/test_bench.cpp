#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <gtest/gtest.h>

#include "hei/bench.hpp"
#include "hei/errors.hpp"
#include "test_util.hpp"

using namespace hei;

TEST(Bench, BraninAtOrigin) {
  const double want = 36.0 + 10.0 * (1.0 - 1.0 / (8.0 * std::numbers::pi)) + 10.0;
  EXPECT_NEAR(eval_branin(Eigen::Vector2d(0.0, 0.0)), want, 1e-12);
  EXPECT_NEAR(want, 55.60211, 1e-5);
}

TEST(Bench, KnownValues) {
  EXPECT_EQ(eval_camel3(Eigen::Vector2d(0.0, 0.0)), 0.0);
  EXPECT_NEAR(eval_camel3(Eigen::Vector2d(1.0, -1.0)), 2.0 - 1.05 + 1.0 / 6.0 - 1.0 + 1.0, 1e-15);
  EXPECT_EQ(eval_levy6(Eigen::VectorXd::Ones(6)), 0.0);
  EXPECT_EQ(eval_ackley10(Eigen::VectorXd::Zero(10)), 0.0);
  EXPECT_NEAR(eval_camel6(Eigen::Vector2d(0.08984201368301331, -0.7126564032704135)),
              -1.031628453489877, 1e-14);
}

TEST(Bench, DomainChecks) {
  EXPECT_THROW((void)eval_branin(Eigen::Vector2d(1.1, 0.5)), ArgumentError);
  EXPECT_THROW((void)eval_camel3(Eigen::Vector3d::Zero()), ArgumentError);
  EXPECT_THROW((void)eval_ackley10(Eigen::VectorXd::Constant(10, 5.5)), ArgumentError);
  EXPECT_THROW((void)find_test_function("rosenbrock"), ArgumentError);
}

TEST(Bench, RegistryConsistency) {
  for (const auto& f : test_functions()) {
    EXPECT_EQ(f.domain.dim(), f.dim) << f.name;
    for (const auto& x : f.minimizers) {
      EXPECT_TRUE(f.domain.contains(x));
      EXPECT_NEAR(f.eval(x), f.f_min, 1e-12) << f.name;
    }
    // random points never beat the recorded minimum
    const Eigen::MatrixXd U = uniform_points(20000, f.dim, 3);
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      EXPECT_GE(f.eval(scale_point(U.row(i).transpose(), f.domain)), f.f_min - 1e-12) << f.name;
    }
  }
}

TEST(BenchSlow, TwoDimensionalMinimaByGrid) {
  for (const char* name : {"branin", "camel3", "camel6"}) {
    const TestFunction& f = find_test_function(name);
    const int g = 2001;
    double best = INFINITY;
    Eigen::Vector2d arg;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const Eigen::Vector2d u(static_cast<double>(i) / (g - 1), static_cast<double>(j) / (g - 1));
        const Eigen::Vector2d x = scale_point(u, f.domain);
        const double v = f.eval(x);
        if (v < best) {
          best = v;
          arg = x;
        }
      }
    }
    // polish the best grid cell with nested 1-D minimization
    const double h = (f.domain.upper[0] - f.domain.lower[0]) / (g - 1);
    const auto inner = [&](double x1) {
      return boost::math::tools::brent_find_minima(
                 [&](double x2) { return f.eval(Eigen::Vector2d(x1, x2)); },
                 std::max(f.domain.lower[1], arg[1] - h), std::min(f.domain.upper[1], arg[1] + h), 60)
          .second;
    };
    const double polished = boost::math::tools::brent_find_minima(
                                inner, std::max(f.domain.lower[0], arg[0] - h),
                                std::min(f.domain.upper[0], arg[0] + h), 60)
                                .second;
    EXPECT_NEAR(std::min(best, polished), f.f_min, 1e-12 * (1.0 + std::abs(f.f_min))) << name;
  }
}

TEST(Suite, SingleReplicationEqualsRun) {
  const TestFunction& f = find_test_function("camel3");
  SuiteConfig s = make_suite_config(f, {Method::EI_OK}, 1, 26, 20, 5);
  const SuiteResult r = run_suite(s);
  ASSERT_EQ(r.table.size(), 26u);
  RunConfig c = s.make_config(Method::EI_OK, 0, derive_seed(5, 0));
  const RunTrace t = run_bo(c);
  for (std::size_t i = 0; i < 26; ++i) {
    EXPECT_EQ(r.table[i].iteration, static_cast<int>(i) + 1);
    EXPECT_EQ(r.table[i].mean_gap, t.records[i].best_y - f.f_min);
    EXPECT_EQ(r.table[i].median_gap, r.table[i].mean_gap);
  }
}

TEST(Suite, ShapeAndDeterminism) {
  const TestFunction& f = find_test_function("camel3");
  SuiteConfig s = make_suite_config(f, {Method::EI_OK, Method::HEI_DSD}, 2, 30, 0, 9);
  s.workers = 2;
  const SuiteResult a = run_suite(s);
  s.workers = 1;
  const SuiteResult b = run_suite(s);
  ASSERT_EQ(a.table.size(), 60u);
  EXPECT_EQ(a.table[0].method, "EI_OK");
  EXPECT_EQ(a.table[30].method, "HEI_DSD");
  for (std::size_t i = 0; i < 60; ++i) {
    EXPECT_EQ(a.table[i].n_ok, 2);
    EXPECT_EQ(a.table[i].mean_gap, b.table[i].mean_gap);
    EXPECT_EQ(a.table[i].median_log10_gap, b.table[i].median_log10_gap);
  }
  EXPECT_EQ(a.successes(0), 2);
  EXPECT_GE(a.mean_final_gap(1), 0.0);
}

TEST(Suite, RejectsEmptyMethods) {
  const TestFunction& f = find_test_function("camel3");
  EXPECT_THROW((void)run_suite(make_suite_config(f, {}, 2, 30, 0, 1)), ConfigError);
}

TEST(StabilityTrace, RequiresDiagnostics) {
  const TestFunction& f = find_test_function("camel3");
  RunConfig c = make_run_config(Method::HEI_DSD, f.domain, f.objective(), 3);
  c.n_tot = 24;
  c.record_stability = false;
  EXPECT_THROW((void)stability_trace(run_bo(c)), ArgumentError);
  c.record_stability = true;
  const auto pts = stability_trace(run_bo(c));
  ASSERT_EQ(pts.size(), 4u);
  for (const auto& p : pts) {
    EXPECT_LE(p.log_ratio, 0.0);
    EXPECT_GT(p.log_ratio, -20.0);
  }
}
