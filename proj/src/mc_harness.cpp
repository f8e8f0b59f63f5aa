#include "gpptest/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "gpptest/errors.hpp"
#include "gpptest/gof.hpp"
#include "gpptest/special_functions.hpp"

namespace gpptest {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCiConfidence = 0.99;

// Runs fn(i) for i in [0, count) on contiguous chunks, one per thread. If any
// call throws, the exception of the smallest failing index is rethrown, so
// the error is the same for every thread count.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> failed_at(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      for (std::size_t i = begin; i < end; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          failed_at[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  const auto first = std::min_element(failed_at.begin(), failed_at.end()) - failed_at.begin();
  if (errors[first]) std::rethrow_exception(errors[first]);
}

bool is_delta(const ExperimentConfig& cfg) { return cfg.family.kind == ModelKind::kDelta; }

ExceedanceSample simulate_replication(const ExperimentConfig& cfg, const ResolvedCell& cell,
                                      const WModel& w, std::uint64_t stream) {
  RandomStream rng(cfg.seed, stream);
  return simulate(cfg.n, cell.c, w, cell.law, rng);
}

bool covers(const MCSummary& s, double tolerance) {
  if (std::isnan(s.prediction)) return false;
  return (s.ci_low <= s.prediction && s.prediction <= s.ci_high) ||
         std::abs(s.estimate - s.prediction) <= tolerance;
}

void require_two_replications(const ExperimentConfig& cfg) {
  if (cfg.replications < 2)
    throw InsufficientDataError("KS check needs at least 2 replications");
}

KsSummary ks_summary(std::string label, double distance, double effective_n,
                     std::int64_t replications, std::int64_t r_effective) {
  KsSummary out;
  out.distance = distance;
  out.critical_value = ks_critical_value_1pct(effective_n);
  out.p_value = ks_p_value(distance, effective_n);
  out.summary.label = std::move(label);
  out.summary.estimate = out.summary.ci_low = out.summary.ci_high = distance;
  out.summary.replications = replications;
  out.summary.r_effective = r_effective;
  out.summary.prediction = 0.0;
  out.summary.within_tolerance = distance < out.critical_value;
  return out;
}

}  // namespace

std::string model_name(ModelKind kind) {
  return kind == ModelKind::kDelta ? "delta" : "expfam";
}

ThresholdSchedule default_schedule(const WFamily& family) {
  return family.kind == ModelKind::kDelta ? default_delta_schedule(family.delta)
                                          : default_expfam_schedule();
}

std::vector<TestSpec> default_tests(ModelKind kind) {
  if (kind == ModelKind::kDelta)
    return {{TestKind::kOptimalDelta, Side::kUpper}, {TestKind::kOmnibus, Side::kUpper}};
  return {{TestKind::kOptimalExpFam, Side::kUpper}, {TestKind::kOmnibus, Side::kUpper}};
}

std::vector<TestSpec> effective_tests(const ExperimentConfig& cfg) {
  return cfg.tests.empty() ? default_tests(cfg.family.kind) : cfg.tests;
}

void validate_config(const ExperimentConfig& cfg) {
  const auto& f = cfg.family;
  if (f.kind == ModelKind::kDelta) {
    if (!(f.delta > 0.0 && f.delta <= 1.0))
      throw ConfigError("delta must lie in (0, 1]", "w.delta");
    if (!(f.u0 > 0.0 && f.u0 < 1.0)) throw ConfigError("u0 must lie in (0, 1)", "w.u0");
  }
  try {
    check_generator(cfg.generator);
  } catch (const ModelError& e) {
    throw ConfigError(e.what(), "generator");
  }
  if (cfg.xi.empty()) throw ConfigError("at least one xi is required", "xi");
  for (double x : cfg.xi)
    if (!std::isfinite(x)) throw ConfigError("xi must be finite", "xi");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)", "alpha");
  if (cfg.n < 0) throw ConfigError("n must be >= 0", "n");
  if (cfg.threshold.c && cfg.threshold.schedule)
    throw ConfigError("give either c or schedule, not both", "threshold");
  if (cfg.threshold.c && !(*cfg.threshold.c < 0.0))
    throw ConfigError("c must be negative", "threshold.c");
  if (const auto& s = cfg.threshold.schedule) {
    if (!(s->c0 > 0.0)) throw ConfigError("c0 must be positive", "threshold.schedule.c0");
    const bool ok = f.kind == ModelKind::kDelta ? admissible_for_delta(*s, f.delta)
                                                : admissible_for_expfam(*s);
    if (!ok)
      throw ConfigError(f.kind == ModelKind::kDelta
                            ? "schedule inadmissible: need 0 < gamma < 1/(1+2 delta)"
                            : "schedule inadmissible: need 0 < gamma < 1",
                        "threshold.schedule.gamma");
  }
  if (!(cfg.clip < 0.0)) throw ConfigError("M must be negative", "M");
  if (cfg.grid_size < 2) throw ConfigError("grid_size must be >= 2", "grid_size");
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1", "replications");
  for (const auto& t : cfg.tests)
    if (t.kind == TestKind::kOptimalDelta && f.kind != ModelKind::kDelta)
      throw ConfigError("optimal_delta tests need the delta model", "tests");
  if (!(cfg.power_tolerance >= 0.0))
    throw ConfigError("power_tolerance must be >= 0", "power_tolerance");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1", "threads");
  if (!(cfg.lan.rel_tol >= 0.0)) throw ConfigError("rel_tol must be >= 0", "lan.rel_tol");
  if (!(cfg.lan.mean_abs_tol >= 0.0))
    throw ConfigError("mean_abs_tol must be >= 0", "lan.mean_abs_tol");
  if (cfg.validation_samples < 2)
    throw ConfigError("mc_samples must be >= 2", "validation.mc_samples");
  if (cfg.theta && !std::isfinite(*cfg.theta)) throw ConfigError("theta must be finite", "theta");
}

double resolve_threshold(const ExperimentConfig& cfg, std::int64_t n) {
  if (cfg.threshold.c) return *cfg.threshold.c;
  const auto schedule = cfg.threshold.schedule.value_or(default_schedule(cfg.family));
  return schedule.at(std::max<std::int64_t>(n, 1));
}

ResolvedCell resolve_cell(const ExperimentConfig& cfg, double xi) {
  validate_config(cfg);
  ResolvedCell cell;
  cell.xi = xi;
  cell.law = inf_law(cfg.generator);
  cell.a = cell.law.a();
  if (!(cell.a > 0.0)) throw ModelError("A = E(inf Z) is zero; no exceedances possible");
  cell.c = resolve_threshold(cfg, cfg.n);
  const std::int64_t n = std::max<std::int64_t>(cfg.n, 1);
  const auto& f = cfg.family;

  if (f.kind == ModelKind::kDelta) {
    cell.b = cell.law.b(f.delta);
    cell.theta = cfg.theta ? *cfg.theta
                 : xi == 0.0 ? 0.0
                             : theta_n_delta(xi, n, cell.c, f.delta);
    const DeltaModel alt{f.delta, cell.theta, f.u0};
    const auto [lo, hi] = validity_range(alt);
    if (cell.theta < lo || cell.theta > hi)
      throw ParameterError("theta_n = " + std::to_string(cell.theta) +
                           " outside the validity range [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    cell.alternative = alt;
    cell.null_model = DeltaModel{f.delta, 0.0, f.u0};
  } else {
    cell.b = kNaN;
    cell.theta = cfg.theta ? *cfg.theta
                 : xi == 0.0 ? 0.0
                             : theta_n_expfam(xi, n, cell.c, cell.a, f.t.limit_at_zero(),
                                              f.t.integral());
    cell.null_model = Uniform01{};
    if (cell.theta == 0.0)
      cell.alternative = Uniform01{};
    else
      cell.alternative = ExpFamilyModel(f.t, cell.theta);
  }
  check_threshold(cell.alternative, cell.law.bound(), cell.c);
  check_threshold(cell.null_model, cell.law.bound(), cell.c);
  return cell;
}

double asymptotic_prediction(const ExperimentConfig& cfg, const ResolvedCell& cell,
                             const TestSpec& test) {
  if (cfg.theta) return kNaN;
  const bool upper = test.side == Side::kUpper;
  const double xi = cell.xi;
  double drift = 0.0;
  if (is_delta(cfg)) {
    const double delta = cfg.family.delta;
    switch (test.kind) {
      case TestKind::kOptimalDelta:
        drift = drift_optimal_delta(xi, cell.a, cell.b, delta);
        break;
      case TestKind::kOmnibus:
        drift = drift_omnibus_delta(xi, cell.a, cell.b, delta);
        break;
      case TestKind::kOptimalExpFam:
        // Z_n1 alone picks up the count part of the central sequence.
        drift = xi * cell.b / ((1.0 + delta) * std::sqrt(cell.a));
        break;
    }
  } else {
    switch (test.kind) {
      case TestKind::kOptimalDelta:
        throw ConfigError("optimal_delta tests need the delta model", "tests");
      case TestKind::kOmnibus:
        drift = 0.0;
        break;
      case TestKind::kOptimalExpFam:
        drift = xi;
        break;
    }
  }
  return rejection_probability(drift, cfg.alpha, upper);
}

TestOutcome run_test(const TestSpec& test, const ExceedanceSample& sample,
                     const ExperimentConfig& cfg, const ResolvedCell& cell) {
  switch (test.kind) {
    case TestKind::kOptimalDelta:
      if (!is_delta(cfg)) throw ConfigError("optimal_delta tests need the delta model", "tests");
      return optimal_test_delta(sample, cell.a, cfg.family.delta, cfg.alpha, test.side);
    case TestKind::kOmnibus:
      return omnibus_test(sample, cfg.alpha, test.side);
    case TestKind::kOptimalExpFam:
      return optimal_test_expfam(sample, cell.a, cfg.alpha, test.side);
  }
  throw ConfigError("unknown test kind", "tests");
}

std::vector<MCSummary> estimate_rejection_rates(const ExperimentConfig& cfg, double xi,
                                                const std::vector<TestSpec>& tests,
                                                std::uint64_t cell_index) {
  if (cfg.n < 1) throw ConfigError("n must be >= 1 for rejection rates", "n");
  const ResolvedCell cell = resolve_cell(cfg, xi);
  std::vector<double> predictions;
  for (const auto& t : tests) predictions.push_back(asymptotic_prediction(cfg, cell, t));

  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t k = tests.size();
  // Per (replication, test): bit 0 = reject, bit 1 = abstained.
  std::vector<std::uint8_t> flags(reps * k, 0);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    const auto sample = simulate_replication(cfg, cell, cell.alternative, cell_stream_id(cell_index, r));
    for (std::size_t j = 0; j < k; ++j) {
      const auto outcome = run_test(tests[j], sample, cfg, cell);
      flags[r * k + j] = static_cast<std::uint8_t>((outcome.reject ? 1 : 0) |
                                                   (outcome.abstained ? 2 : 0));
    }
  });

  std::vector<MCSummary> out;
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t rejections = 0;
    std::size_t effective = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto f = flags[r * k + j];
      if (f & 2) continue;
      ++effective;
      rejections += f & 1;
    }
    if (effective == 0)
      throw InsufficientDataError(test_name(tests[j]) + ": every replication abstained (tau = 0)");
    MCSummary s;
    s.label = test_name(tests[j]);
    s.xi = xi;
    s.estimate = static_cast<double>(rejections) / static_cast<double>(effective);
    const auto ci = wilson_interval(rejections, effective, kCiConfidence);
    s.ci_low = std::min(ci.low, s.estimate);
    s.ci_high = std::max(ci.high, s.estimate);
    s.replications = cfg.replications;
    s.r_effective = static_cast<std::int64_t>(effective);
    s.prediction = predictions[j];
    s.within_tolerance = covers(s, cfg.power_tolerance);
    out.push_back(std::move(s));
  }
  return out;
}

MCSummary estimate_rejection_rate(const ExperimentConfig& cfg, double xi, const TestSpec& test) {
  return estimate_rejection_rates(cfg, xi, {test}).front();
}

std::vector<PowerRow> power_curve(const ExperimentConfig& cfg, const std::vector<double>& xis,
                                  const std::vector<TestSpec>& tests) {
  std::vector<PowerRow> rows;
  for (std::size_t i = 0; i < xis.size(); ++i) {
    try {
      for (auto& s : estimate_rejection_rates(cfg, xis[i], tests, i)) rows.push_back({s, {}});
    } catch (const Error& e) {
      for (const auto& t : tests) {
        MCSummary s;
        s.label = test_name(t);
        s.xi = xis[i];
        s.estimate = s.ci_low = s.ci_high = s.prediction = kNaN;
        s.replications = cfg.replications;
        rows.push_back({s, e.what()});
      }
    }
  }
  return rows;
}

std::vector<ExceedanceSample> simulate_replications(const ExperimentConfig& cfg, double xi) {
  const ResolvedCell cell = resolve_cell(cfg, xi);
  std::vector<ExceedanceSample> out(static_cast<std::size_t>(cfg.replications));
  parallel_for(out.size(), cfg.threads, [&](std::size_t r) {
    out[r] = simulate_replication(cfg, cell, cell.alternative, r);
  });
  return out;
}

KsSummary ks_uniformity_check(const ExperimentConfig& cfg, KsTarget target) {
  require_two_replications(cfg);
  ExperimentConfig null_cfg = cfg;
  null_cfg.theta.reset();
  const ResolvedCell cell = resolve_cell(null_cfg, 0.0);
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);

  if (target == KsTarget::kOmnibusStatistic) {
    std::vector<double> stats(reps, kNaN);
    parallel_for(reps, cfg.threads, [&](std::size_t r) {
      const auto sample = simulate_replication(cfg, cell, cell.null_model, r);
      if (sample.tau() > 0) stats[r] = omnibus_statistic(sample).value;
    });
    std::erase_if(stats, [](double x) { return std::isnan(x); });
    if (stats.size() < 2)
      throw InsufficientDataError("KS check: fewer than 2 replications with exceedances");
    const double n_eff = static_cast<double>(stats.size());
    const double d = ks_distance(std::move(stats), std_normal_cdf);
    return ks_summary("ks_omnibus_statistic", d, n_eff, cfg.replications,
                      static_cast<std::int64_t>(n_eff));
  }

  std::vector<std::vector<double>> per_rep(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    per_rep[r] = simulate_replication(cfg, cell, cell.null_model, r).ys;
  });
  std::vector<double> pooled;
  std::int64_t with_exceedance = 0;
  for (auto& ys : per_rep) {
    with_exceedance += ys.empty() ? 0 : 1;
    pooled.insert(pooled.end(), ys.begin(), ys.end());
  }
  if (pooled.size() < 2) throw InsufficientDataError("KS check: fewer than 2 exceedances");
  const double n_eff = static_cast<double>(pooled.size());
  const double d = ks_distance(std::move(pooled), [](double u) { return std::clamp(u, 0.0, 1.0); });
  return ks_summary("ks_pooled_y", d, n_eff, cfg.replications, with_exceedance);
}

KsSummary compare_samplers(const ExperimentConfig& cfg) {
  require_two_replications(cfg);
  if (std::holds_alternative<ExplicitInfLawGenerator>(cfg.generator))
    throw ConfigError("the functional sampler needs a generator with paths", "generator");
  const ResolvedCell cell = resolve_cell(cfg, cfg.xi.front());
  if (!(cfg.clip < cell.c)) throw ConfigError("M must lie below the threshold c", "M");
  const auto grid = uniform_grid(cfg.grid_size);
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);

  std::vector<std::vector<double>> reduced(reps);
  std::vector<std::vector<double>> functional(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    reduced[r] = simulate_replication(cfg, cell, cell.alternative, cell_stream_id(0, r)).ys;
    RandomStream rng(cfg.seed, cell_stream_id(1, r));
    functional[r] =
        simulate_functional(cfg.n, cell.c, cell.alternative, cfg.generator, grid, cfg.clip, rng).ys;
  });
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t r = 0; r < reps; ++r) {
    a.insert(a.end(), reduced[r].begin(), reduced[r].end());
    b.insert(b.end(), functional[r].begin(), functional[r].end());
  }
  if (a.size() < 2 || b.size() < 2)
    throw InsufficientDataError("sampler comparison: fewer than 2 exceedances per sampler");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n_eff = na * nb / (na + nb);
  const double d = ks_two_sample_distance(std::move(a), std::move(b));
  return ks_summary("ks_two_sample", d, n_eff, cfg.replications,
                    static_cast<std::int64_t>(std::min(na, nb)));
}

LanSummary lan_empirical_check(const ExperimentConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("n must be >= 1 for the LAN check", "n");
  const double xi = cfg.xi.front();
  const ResolvedCell cell = resolve_cell(cfg, xi);
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);

  std::vector<double> values(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    const auto sample = simulate_replication(cfg, cell, cell.null_model, r);
    try {
      values[r] = loglik_ratio(sample, cell.alternative, cell.null_model, cell.law);
    } catch (const EvaluationError& e) {
      throw EvaluationError(std::string(e.what()) + " (replication " + std::to_string(r) + ")", r);
    }
  });

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(reps);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = reps > 1 ? var / static_cast<double>(reps - 1) : 0.0;

  LanSummary out;
  out.predicted = is_delta(cfg) ? lan_params_delta(xi, cell.a, cell.b, cfg.family.delta)
                                : lan_params_expfam(xi);
  const double z = std_normal_quantile(0.5 + 0.5 * kCiConfidence);
  const double rr = static_cast<double>(reps);

  out.mean.label = "lan_mean";
  out.mean.xi = xi;
  out.mean.estimate = mean;
  out.mean.ci_low = mean - z * std::sqrt(var / rr);
  out.mean.ci_high = mean + z * std::sqrt(var / rr);
  out.mean.replications = out.mean.r_effective = cfg.replications;
  out.mean.prediction = out.predicted.mean_h0;
  out.mean.within_tolerance =
      std::abs(mean - out.predicted.mean_h0) <=
      std::max(cfg.lan.rel_tol * std::abs(out.predicted.mean_h0), cfg.lan.mean_abs_tol);

  const double spread = reps > 1 ? z * std::sqrt(2.0 / (rr - 1.0)) : 0.0;
  out.variance.label = "lan_variance";
  out.variance.xi = xi;
  out.variance.estimate = var;
  out.variance.ci_low = std::max(0.0, var * (1.0 - spread));
  out.variance.ci_high = var * (1.0 + spread);
  out.variance.replications = out.variance.r_effective = cfg.replications;
  out.variance.prediction = out.predicted.sigma2;
  out.variance.within_tolerance =
      std::abs(var - out.predicted.sigma2) <= cfg.lan.rel_tol * out.predicted.sigma2;

  out.within_tolerance = out.mean.within_tolerance && out.variance.within_tolerance;
  return out;
}

}  // namespace gpptest
