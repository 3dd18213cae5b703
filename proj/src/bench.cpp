#include "hei/bench.hpp"

#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "hei/errors.hpp"
#include "hei/rng.hpp"
#include "hei/special.hpp"

namespace hei {

namespace {

using special::kPi;

void require_in_box(const Eigen::Ref<const Eigen::VectorXd>& x, int dim, double lo, double hi,
                    const char* name) {
  if (x.size() != dim) {
    throw ArgumentError(std::string(name) + ": expected dimension " + std::to_string(dim));
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lo && x[j] <= hi)) {
      throw ArgumentError(std::string(name) + ": point outside the domain");
    }
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  if (v.size() % 2 == 1) return v[h];
  return 0.5 * (v[h - 1] + v[h]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

Domain box(int dim, double lo, double hi) {
  return Domain(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi));
}

}  // namespace

double eval_branin(const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_in_box(x, 2, 0.0, 1.0, "branin");
  const double x1 = x[0];
  const double x2 = x[1];
  const double t = x2 - 5.1 / (4.0 * kPi * kPi) * x1 * x1 + 5.0 / kPi * x1 - 6.0;
  return t * t + 10.0 * (1.0 - 1.0 / (8.0 * kPi)) * std::cos(x1) + 10.0;
}

double eval_camel3(const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_in_box(x, 2, -2.0, 2.0, "camel3");
  const double x1 = x[0];
  const double x2 = x[1];
  const double x1sq = x1 * x1;
  return 2.0 * x1sq - 1.05 * x1sq * x1sq + x1sq * x1sq * x1sq / 6.0 + x1 * x2 + x2 * x2;
}

double eval_camel6(const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_in_box(x, 2, -2.0, 2.0, "camel6");
  const double x1 = x[0];
  const double x2 = x[1];
  const double x1sq = x1 * x1;
  const double x2sq = x2 * x2;
  return (4.0 - 2.1 * x1sq + x1sq * x1sq / 3.0) * x1sq + x1 * x2 + (-4.0 + 4.0 * x2sq) * x2sq;
}

double eval_levy6(const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_in_box(x, 6, -10.0, 10.0, "levy6");
  double w[6];
  for (int i = 0; i < 6; ++i) w[i] = 1.0 + (x[i] - 1.0) / 4.0;
  const double s1 = boost::math::sin_pi(w[0]);
  double f = s1 * s1;
  for (int i = 0; i < 5; ++i) {
    const double s = std::sin(kPi * w[i] + 1.0);
    f += (w[i] - 1.0) * (w[i] - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double s6 = boost::math::sin_pi(2.0 * w[5]);
  f += (w[5] - 1.0) * (w[5] - 1.0) * (1.0 + s6 * s6);
  return f;
}

double eval_ackley10(const Eigen::Ref<const Eigen::VectorXd>& x) {
  require_in_box(x, 10, -5.0, 5.0, "ackley10");
  double sq = 0.0;
  double cs = 0.0;
  for (int i = 0; i < 10; ++i) {
    sq += x[i] * x[i];
    cs += std::cos(2.0 * kPi * x[i]);
  }
  const double e = std::exp(1.0);
  // Grouped so that the origin evaluates to exactly zero.
  return (20.0 - 20.0 * std::exp(-0.2 / std::sqrt(10.0) * std::sqrt(sq))) +
         (e - std::exp(cs / 10.0));
}

Objective TestFunction::objective() const {
  auto f = eval;
  return [f](const Eigen::VectorXd& x) { return f(x); };
}

const std::vector<TestFunction>& test_functions() {
  static const std::vector<TestFunction> fns = [] {
    std::vector<TestFunction> v;
    v.push_back({"branin", 2, box(2, 0.0, 1.0), eval_branin,
                 eval_branin(Eigen::Vector2d(1.0, 1.0)),
                 "grid oracle on [0,1]^2; the function decreases in both coordinates, so the "
                 "minimum is the corner (1,1)",
                 {Eigen::Vector2d(1.0, 1.0)}});
    v.push_back({"camel3", 2, box(2, -2.0, 2.0), eval_camel3, 0.0,
                 "exact: every term vanishes at the origin; global by grid oracle",
                 {Eigen::Vector2d(0.0, 0.0)}});
    v.push_back({"camel6", 2, box(2, -2.0, 2.0), eval_camel6, -1.031628453489877,
                 "grid oracle (2001 x 2001) plus local refinement",
                 {Eigen::Vector2d(0.08984201368301331, -0.7126564032704135),
                  Eigen::Vector2d(-0.08984201368301331, 0.7126564032704135)}});
    v.push_back({"levy6", 6, box(6, -10.0, 10.0), eval_levy6, 0.0,
                 "exact: all terms vanish at x = (1,...,1)", {Eigen::VectorXd::Ones(6)}});
    v.push_back({"ackley10", 10, box(10, -5.0, 5.0), eval_ackley10, 0.0,
                 "exact: the origin cancels to zero", {Eigen::VectorXd::Zero(10)}});
    return v;
  }();
  return fns;
}

const TestFunction& find_test_function(const std::string& name) {
  for (const auto& f : test_functions()) {
    if (f.name == name) return f;
  }
  throw ArgumentError("unknown test function '" + name + "'");
}

SuiteConfig make_suite_config(const TestFunction& function, std::vector<Method> methods,
                              int replications, int n_tot, int n_ini, std::uint64_t base_seed) {
  SuiteConfig s;
  s.methods = std::move(methods);
  s.replications = replications;
  s.base_seed = base_seed;
  const TestFunction* fn = &function;
  s.make_config = [fn, n_tot, n_ini](Method m, int, std::uint64_t seed) {
    RunConfig c = make_run_config(m, fn->domain, fn->objective(), seed);
    c.f_min = fn->f_min;
    c.n_tot = n_tot;
    c.n_ini = n_ini;
    return c;
  };
  return s;
}

int SuiteResult::successes(std::size_t method_index) const {
  int ok = 0;
  for (const auto& t : traces.at(method_index)) ok += t.ok() ? 1 : 0;
  return ok;
}

double SuiteResult::mean_final_gap(std::size_t method_index) const {
  std::vector<double> gaps;
  for (const auto& t : traces.at(method_index)) {
    if (t.ok() && t.f_min) gaps.push_back(t.best_y - *t.f_min);
  }
  return mean(gaps);
}

SuiteResult run_suite(const SuiteConfig& config) {
  if (config.methods.empty()) throw ConfigError("suite needs at least one method");
  if (config.replications < 1) throw ConfigError("suite needs at least one replication");
  if (!config.make_config) throw ConfigError("suite has no config factory");

  const std::size_t n_methods = config.methods.size();
  const auto reps = static_cast<std::size_t>(config.replications);

  // Build and validate every config before any objective evaluation.
  std::vector<RunConfig> configs;
  configs.reserve(n_methods * reps);
  for (std::size_t m = 0; m < n_methods; ++m) {
    for (std::size_t r = 0; r < reps; ++r) {
      RunConfig c = config.make_config(config.methods[m], static_cast<int>(r),
                                       derive_seed(config.base_seed, r));
      if (!c.f_min) throw ConfigError("suite runs need a known f_min");
      c.validate();
      configs.push_back(std::move(c));
    }
  }

  SuiteResult out;
  out.methods = config.methods;
  out.traces.assign(n_methods, std::vector<RunTrace>(reps));

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t job = next++; job < configs.size(); job = next++) {
      const std::size_t m = job / reps;
      const std::size_t r = job % reps;
      RunTrace t;
      try {
        t = run_bo(configs[job]);
      } catch (const std::exception& e) {
        t.method_name = configs[job].method_name;
        t.error = e.what();
      }
      configs[job].objective = nullptr;  // releases any external child process
      out.traces[m][r] = std::move(t);
    }
  };
  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(configs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t m = 0; m < n_methods; ++m) {
    std::size_t length = 0;
    for (const auto& t : out.traces[m]) {
      if (t.ok()) length = std::max(length, t.records.size());
    }
    for (std::size_t i = 0; i < length; ++i) {
      std::vector<double> gaps;
      std::vector<double> logs;
      for (const auto& t : out.traces[m]) {
        if (!t.ok() || i >= t.records.size()) continue;
        const double gap = t.records[i].best_y - *t.f_min;
        gaps.push_back(gap);
        logs.push_back(std::log10(gap));
      }
      GapRow row;
      row.method = std::string(to_string(config.methods[m]));
      row.iteration = static_cast<int>(i) + 1;
      row.n_ok = static_cast<int>(gaps.size());
      row.mean_gap = mean(gaps);
      row.median_gap = median(gaps);
      row.mean_log10_gap = mean(logs);
      row.median_log10_gap = median(logs);
      out.table.push_back(row);
    }
  }
  return out;
}

std::vector<StabilityPoint> stability_trace(const RunTrace& trace) {
  std::vector<StabilityPoint> out;
  for (const auto& rec : trace.records) {
    if (rec.initial) continue;
    if (!std::isfinite(rec.s_next) || !std::isfinite(rec.s_max_est)) {
      throw ArgumentError("stability_trace: iteration " + std::to_string(rec.iteration) +
                          " has no variance diagnostics");
    }
    out.push_back({rec.iteration, std::log(rec.s_next / rec.s_max_est), rec.epsilon_step});
  }
  return out;
}

}  // namespace hei
