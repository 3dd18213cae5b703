#include "hei/driver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "hei/errors.hpp"
#include "hei/local_search.hpp"
#include "hei/trend.hpp"

namespace hei {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stream ids for derive_seed. The main stream drives theta starts, candidate
// sets and epsilon-greedy draws; the pool stream is separate so that turning
// the stability diagnostic on or off never changes the query sequence.
constexpr std::uint64_t kMainStream = 1;
constexpr std::uint64_t kDesignStream = 2;
constexpr std::uint64_t kPoolStream = 1000;

constexpr Eigen::Index kPoolChunk = 4096;

std::string normalize_name(std::string_view name) {
  std::string out;
  for (const char c : name) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

std::vector<int> feasible_orders(const RunConfig& c) {
  std::vector<int> out;
  for (const int order : c.trend_candidates) {
    if (order < 0) continue;
    if (2 * basis_count(order, c.dim()) <= static_cast<std::size_t>(c.initial_size())) {
      out.push_back(order);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double max_s_over_pool(const GPFit& fit, long pool_size, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index d = fit.inputs().cols();
  double best = 0.0;
  for (long done = 0; done < pool_size;) {
    const Eigen::Index rows = std::min<Eigen::Index>(kPoolChunk, pool_size - done);
    Eigen::MatrixXd Z(rows, d);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) Z(i, j) = rng.uniform();
    }
    best = std::max(best, fit.predict_s2_batch(Z).maxCoeff());
    done += rows;
  }
  return std::sqrt(best);
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::EI_OK: return "EI_OK";
    case Method::EI_UK: return "EI_UK";
    case Method::HEI_WEAK: return "HEI_WEAK";
    case Method::HEI_MMAP: return "HEI_MMAP";
    case Method::HEI_DSD: return "HEI_DSD";
    case Method::SEI: return "SEI";
    case Method::UCB_OK: return "UCB_OK";
    case Method::EPS_EI_OK: return "EPS_EI_OK";
    case Method::EPS_EI_UK: return "EPS_EI_UK";
    case Method::STAB_EI_UK: return "STAB_EI_UK";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{
      Method::EI_OK,  Method::EI_UK,  Method::HEI_WEAK,  Method::HEI_MMAP,  Method::HEI_DSD,
      Method::SEI,    Method::UCB_OK, Method::EPS_EI_OK, Method::EPS_EI_UK, Method::STAB_EI_UK};
  return methods;
}

Method parse_method(std::string_view name) {
  const std::string key = normalize_name(name);
  for (const Method m : all_methods()) {
    if (normalize_name(to_string(m)) == key) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

double stab_gamma(int dim) { return std::min(0.1 * dim, 0.8); }

void RunConfig::validate() const {
  if (domain.dim() < 1) throw ConfigError("domain is empty");
  if (!objective) throw ConfigError("no objective");
  const int n0 = initial_size();
  if (n0 < 2) throw ConfigError("n_ini must be at least 2");
  if (n_tot < n0) throw ConfigError("n_tot must be at least n_ini");
  if (!(theta.lower > 0.0) || !(theta.lower <= theta.upper) || !std::isfinite(theta.upper)) {
    throw ConfigError("length-scale bounds need 0 < lower <= upper < infinity");
  }
  if (theta.random_starts < 0 || theta.refine_top < 0) {
    throw ConfigError("length-scale search counts must be nonnegative");
  }
  if (optimizer.candidates_per_dim < 1 || optimizer.perturbations < 0 || optimizer.refine_top < 0) {
    throw ConfigError("acquisition optimizer counts out of range");
  }
  if (pool_cap < 1) throw ConfigError("pool cap must be positive");
  if (lhd_restarts < 1) throw ConfigError("lhd restarts must be positive");
  try {
    acq.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (acq.kind == AcqKind::HEI) hyper.validate();

  std::size_t q = 0;
  if (trend_order >= 0) {
    q = basis_count(trend_order, dim());
  } else if (trend_order == -1) {
    const auto orders = feasible_orders(*this);
    if (orders.empty()) throw ConfigError("no trend order has q <= n_ini / 2");
    q = basis_count(orders.back(), dim());
  } else {
    throw ConfigError("trend order must be -1 (BIC) or nonnegative");
  }
  if (static_cast<std::size_t>(n0) < q + 3) {
    throw ConfigError("n_ini must be at least q + 3 for the chosen trend");
  }
}

RunConfig make_run_config(Method method, const Domain& domain, Objective objective,
                          std::uint64_t seed) {
  RunConfig c;
  c.method_name = std::string(to_string(method));
  c.domain = domain;
  c.objective = std::move(objective);
  c.seed = seed;
  switch (method) {
    case Method::EI_OK:
      c.acq.kind = AcqKind::EI_OK;
      c.trend_order = 0;
      break;
    case Method::EI_UK:
      c.acq.kind = AcqKind::EI_UK;
      break;
    case Method::HEI_WEAK:
    case Method::HEI_MMAP:
    case Method::HEI_DSD:
      c.acq.kind = AcqKind::HEI;
      c.hyper.scheme = method == Method::HEI_WEAK   ? PriorScheme::Weak
                       : method == Method::HEI_MMAP ? PriorScheme::MMAP
                                                    : PriorScheme::DSD;
      break;
    case Method::SEI:
      c.acq.kind = AcqKind::SEI;
      c.acq.prior = HierPrior::fixed(kSeiA, kSeiB, PriorScheme::Weak);
      c.trend_order = 0;
      break;
    case Method::UCB_OK:
      c.acq.kind = AcqKind::UCB;
      c.trend_order = 0;
      break;
    case Method::EPS_EI_OK:
      c.acq.kind = AcqKind::EI_OK;
      c.acq.epsilon = kEpsilonGreedy;
      c.trend_order = 0;
      break;
    case Method::EPS_EI_UK:
      c.acq.kind = AcqKind::EI_UK;
      c.acq.epsilon = kEpsilonGreedy;
      break;
    case Method::STAB_EI_UK:
      c.acq.kind = AcqKind::EI_UK;
      c.acq.gamma = stab_gamma(domain.dim());
      break;
  }
  return c;
}

ThetaEstimate estimate_lengthscales(const Dataset& data, KernelFamily family,
                                    const TrendModel& trend, const ThetaOptions& options, Rng& rng,
                                    const Eigen::VectorXd* previous) {
  const int d = static_cast<int>(data.dim());
  if (data.size() <= trend.size()) {
    throw InsufficientDataError("estimate_lengthscales: need n > q");
  }
  if (!(options.lower > 0.0) || !(options.lower <= options.upper)) {
    throw ArgumentError("estimate_lengthscales: need 0 < lower <= upper");
  }
  const double lo = std::log(options.lower);
  const double hi = std::log(options.upper);
  const auto to_theta = [&](const Eigen::VectorXd& z) {
    return Eigen::VectorXd(z.array().exp().max(options.lower).min(options.upper));
  };
  const auto loglik = [&](const Eigen::VectorXd& z) {
    try {
      return profile_loglik(data, KernelSpec(family, to_theta(z)), trend);
    } catch (const ConditioningError&) {
      return kNegInf;
    }
  };

  if (options.lower == options.upper) {
    const Eigen::VectorXd z = Eigen::VectorXd::Constant(d, lo);
    return ThetaEstimate{to_theta(z), loglik(z), true};
  }

  std::vector<Eigen::VectorXd> starts;
  for (int s = 0; s < options.random_starts; ++s) {
    Eigen::VectorXd z(d);
    for (int j = 0; j < d; ++j) z[j] = rng.uniform(lo, hi);
    starts.push_back(z);
  }
  if (previous != nullptr) {
    if (previous->size() != d) throw ArgumentError("estimate_lengthscales: previous theta dimension");
    starts.push_back(previous->array().max(options.lower).min(options.upper).log().matrix());
  }
  if (starts.empty()) starts.push_back(Eigen::VectorXd::Constant(d, 0.5 * (lo + hi)));

  std::vector<double> values(starts.size());
  for (std::size_t s = 0; s < starts.size(); ++s) values[s] = loglik(starts[s]);
  std::vector<std::size_t> order(starts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  ThetaEstimate best{starts[order[0]], values[order[0]], false};
  const double start_best = values[order[0]];
  PatternSearchOptions ps;
  ps.initial_step = 0.1 * (hi - lo);
  ps.tolerance = options.log_tolerance;
  ps.max_evals = options.max_evals_per_start;
  const Eigen::VectorXd zlo = Eigen::VectorXd::Constant(d, lo);
  const Eigen::VectorXd zhi = Eigen::VectorXd::Constant(d, hi);
  const std::size_t refine = std::min<std::size_t>(options.refine_top, order.size());
  for (std::size_t r = 0; r < refine; ++r) {
    const std::size_t s = order[r];
    if (!std::isfinite(values[s])) continue;
    const auto res = pattern_search_max(loglik, starts[s], values[s], zlo, zhi, ps);
    if (res.value > best.loglik) {
      best.theta = res.x;
      best.loglik = res.value;
    }
  }
  best.improved = best.loglik > start_best;
  best.theta = to_theta(best.theta);
  return best;
}

double stab_threshold(const GPFit& fit, double gamma,
                      const Eigen::Ref<const Eigen::MatrixXd>& pool) {
  if (pool.rows() == 0) throw ArgumentError("stab_threshold: empty pool");
  return gamma * std::sqrt(fit.predict_s2_batch(pool).maxCoeff());
}

long stability_pool_size(int dim, long cap) {
  long size = 100;
  for (int j = 0; j < dim && size < cap; ++j) size *= 10;
  return std::min(size, cap);
}

AcqChoice maximize_acquisition(const AcqState& state, const AcqSpec& spec,
                               const Eigen::VectorXd& incumbent, const AcqOptimizerOptions& options,
                               const std::optional<StabConstraint>& constraint, Rng& rng,
                               bool explore) {
  const auto d = static_cast<Eigen::Index>(incumbent.size());
  const Eigen::Index m = static_cast<Eigen::Index>(options.candidates_per_dim) * d;
  const Eigen::Index total = m + options.perturbations;
  if (total < 1) throw ArgumentError("maximize_acquisition: no candidates");

  // Jittered Latin hypercube plus perturbations of the incumbent.
  Eigen::MatrixXd C(total, d);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    for (Eigen::Index i = m - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      C(i, j) = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(m);
    }
  }
  for (Eigen::Index i = m; i < total; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double delta = options.perturbation_radius * (2.0 * rng.uniform() - 1.0);
      C(i, j) = std::clamp(incumbent[j] + delta, 0.0, 1.0);
    }
  }

  const BatchValues batch = evaluate_batch(state, spec, C);
  const Eigen::VectorXd& score = explore ? batch.s : batch.value;
  std::vector<Eigen::Index> feasible;
  for (Eigen::Index i = 0; i < total; ++i) {
    // Margin so that a batch-feasible candidate stays feasible under predict().
    if (!constraint || constraint->feasible(batch.s[i] * (1.0 - 1e-12))) feasible.push_back(i);
  }

  AcqChoice choice;
  if (feasible.empty()) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < total; ++i) {
      if (batch.s[i] > batch.s[arg]) arg = i;
    }
    choice.x = C.row(arg).transpose();
    choice.value = batch.value[arg];
    choice.s = batch.s[arg];
    choice.fallback = true;
    return choice;
  }

  std::stable_sort(feasible.begin(), feasible.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return score[a] > score[b]; });

  const auto point_score = [&](const Eigen::VectorXd& x) {
    const auto pred = state.fit->predict(x);
    const double s = std::sqrt(pred.s2);
    if (constraint && !constraint->feasible(s)) return kNegInf;
    return explore ? s : criterion_value(state, spec, pred.mean, pred.s2);
  };

  PatternSearchOptions ps;
  ps.initial_step = options.refine_initial_step;
  ps.tolerance = options.refine_tolerance;
  ps.max_evals = options.refine_max_evals;
  const Eigen::VectorXd lower = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd upper = Eigen::VectorXd::Ones(d);

  choice.x = C.row(feasible[0]).transpose();
  double best = score[feasible[0]];
  const std::size_t refine = std::min<std::size_t>(options.refine_top, feasible.size());
  for (std::size_t r = 0; r < refine; ++r) {
    const Eigen::Index i = feasible[r];
    const auto res = pattern_search_max(point_score, C.row(i).transpose(), score[i], lower, upper, ps);
    if (res.value > best) {
      best = res.value;
      choice.x = res.x;
    }
  }
  const auto pred = state.fit->predict(choice.x);
  choice.s = std::sqrt(pred.s2);
  choice.value = criterion_value(state, spec, pred.mean, pred.s2);
  return choice;
}

RunTrace run_bo(const RunConfig& config) {
  config.validate();
  const int d = config.dim();
  const int n_ini = config.initial_size();
  const bool need_pool = config.record_stability || config.acq.stabilized();

  RunTrace trace;
  trace.method_name = config.method_name;
  trace.dim = d;
  trace.n_ini = n_ini;
  trace.f_min = config.f_min;
  trace.pool_size = need_pool ? stability_pool_size(d, config.pool_cap) : 0;

  Rng rng(derive_seed(config.seed, kMainStream));
  Dataset data;
  data.X.resize(0, d);

  const auto finish = [&]() {
    if (!data.y.size()) return;
    Eigen::Index arg = 0;
    trace.best_y = data.y.minCoeff(&arg);
    trace.best_x = trace.records[static_cast<std::size_t>(arg)].x;
  };

  // Evaluates the objective at a unit-cube point; false (and trace.error) on failure.
  const auto observe = [&](const Eigen::VectorXd& u, RunRecord rec) {
    rec.x = scale_point(u, config.domain);
    double y = 0.0;
    try {
      y = config.objective(rec.x);
    } catch (const std::exception& e) {
      trace.error = std::string("objective failed: ") + e.what();
      return false;
    }
    if (!std::isfinite(y)) {
      trace.error = "objective returned a non-finite value";
      return false;
    }
    data.append(u, y);
    rec.iteration = static_cast<int>(data.size());
    rec.y = y;
    rec.best_y = trace.records.empty() ? y : std::min(trace.records.back().best_y, y);
    trace.records.push_back(std::move(rec));
    return true;
  };

  const Eigen::MatrixXd design =
      maximin_lhd(n_ini, d, derive_seed(config.seed, kDesignStream), config.lhd_restarts);
  for (int i = 0; i < n_ini; ++i) {
    RunRecord rec;
    rec.initial = true;
    rec.acq_value = rec.s_next = rec.s_max_est = rec.a = rec.b = kNaN;
    if (!observe(design.row(i).transpose(), std::move(rec))) {
      finish();
      return trace;
    }
  }

  // Model selection on the initial design.
  const TrendModel constant(0, d);
  Eigen::VectorXd theta = estimate_lengthscales(data, config.kernel, constant, config.theta, rng).theta;
  int order = config.trend_order;
  if (order < 0) {
    const auto orders = feasible_orders(config);
    order = select_order_bic(data, KernelSpec(config.kernel, theta), orders);
  }
  const TrendModel trend(order, d);
  trace.trend_order = order;
  if (order != 0) {
    theta = estimate_lengthscales(data, config.kernel, trend, config.theta, rng, &theta).theta;
  }

  HierPrior base_prior;
  if (config.acq.kind == AcqKind::HEI) {
    const GPFit initial_fit(data, KernelSpec(config.kernel, theta), trend);
    PriorEstimate est = estimate_prior(config.hyper, initial_fit);
    base_prior = est.prior;
    if (!est.warning.empty()) trace.warnings.push_back(est.warning);
    trace.has_prior = true;
  } else if (config.acq.kind == AcqKind::SEI) {
    base_prior = config.acq.prior;
    trace.has_prior = true;
  }
  trace.prior = base_prior;

  int no_improve = 0;
  int fallbacks = 0;
  for (int n = n_ini; n < config.n_tot; ++n) {
    const ThetaEstimate est =
        estimate_lengthscales(data, config.kernel, trend, config.theta, rng, &theta);
    theta = est.theta;
    if (!est.improved) ++no_improve;

    auto fit = std::make_shared<const GPFit>(data, KernelSpec(config.kernel, theta), trend);
    const HierPrior prior = base_prior.at_sample_size(static_cast<std::size_t>(n));
    Eigen::Index best_row = 0;
    const double y_star = data.y.minCoeff(&best_row);
    const AcqState state(fit, prior, y_star);

    double pool_max = kNaN;
    if (need_pool) {
      pool_max = max_s_over_pool(*fit, trace.pool_size,
                                 derive_seed(config.seed, kPoolStream + static_cast<std::uint64_t>(n)));
    }

    RunRecord rec;
    rec.theta = theta;
    rec.a = trace.has_prior ? prior.a : kNaN;
    rec.b = trace.has_prior ? prior.b : kNaN;

    Eigen::VectorXd u;
    if (config.acq.epsilon_greedy() && rng.uniform() < config.acq.epsilon) {
      u.resize(d);
      for (int j = 0; j < d; ++j) u[j] = rng.uniform();
      const auto pred = fit->predict(u);
      rec.acq_value = criterion_value(state, config.acq, pred.mean, pred.s2);
      rec.epsilon_step = true;
    } else {
      std::optional<StabConstraint> constraint;
      if (config.acq.stabilized() && pool_max > 0.0) {
        constraint = StabConstraint{pool_max, config.acq.gamma};
      }
      const AcqChoice choice =
          maximize_acquisition(state, config.acq, data.X.row(best_row).transpose(),
                               config.optimizer, constraint, rng, fit->degenerate());
      u = choice.x;
      rec.acq_value = choice.value;
      rec.fallback = choice.fallback || fit->degenerate();
      if (rec.fallback) ++fallbacks;
    }
    rec.s_next = std::sqrt(fit->predict_s2(u));
    rec.s_max_est = need_pool ? std::max(pool_max, rec.s_next) : kNaN;

    if (!observe(u, std::move(rec))) break;
  }

  if (no_improve > 0) {
    trace.warnings.push_back("length-scale search did not improve on its best start in " +
                             std::to_string(no_improve) + " iterations");
  }
  if (fallbacks > 0) {
    trace.warnings.push_back("acquisition fell back to maximum-variance exploration in " +
                             std::to_string(fallbacks) + " iterations");
  }
  finish();
  return trace;
}

}  // namespace hei
