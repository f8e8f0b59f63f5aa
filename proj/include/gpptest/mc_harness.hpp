#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpptest/asymptotics.hpp"
#include "gpptest/exceedance.hpp"
#include "gpptest/generators.hpp"
#include "gpptest/random.hpp"
#include "gpptest/teststats.hpp"
#include "gpptest/w_models.hpp"

namespace gpptest {

enum class ModelKind { kDelta, kExpFam };

// Parametric family of W; the parameter itself is derived from xi per cell.
struct WFamily {
  ModelKind kind = ModelKind::kDelta;
  double delta = 1.0;  // delta model
  double u0 = 0.5;     // delta model
  StatisticT t = StatisticT::identity();  // exponential family
};

// Either a fixed c or a schedule; neither means the model's default schedule.
struct ThresholdSpec {
  std::optional<double> c;
  std::optional<ThresholdSchedule> schedule;
};

struct LanTolerance {
  double rel_tol = 0.15;
  // Absolute slack on the mean, used when it exceeds rel_tol |mean|.
  double mean_abs_tol = 0.03;
};

struct ExperimentConfig {
  WFamily family;
  GeneratorModel generator = ConstantGenerator{};
  std::vector<double> xi{0.0};
  double alpha = 0.05;
  std::int64_t n = 10'000;
  ThresholdSpec threshold;
  double clip = -1.0;  // M
  std::size_t grid_size = 1024;
  std::int64_t replications = 1000;
  Seed seed = 1;
  // Empty: the model's default tests.
  std::vector<TestSpec> tests;
  // Estimates within this distance of the prediction count as matching even
  // when the CI misses it (0: CI coverage only).
  double power_tolerance = 0.0;
  unsigned threads = 1;
  LanTolerance lan;
  // Paths per node for Monte Carlo generator validation.
  std::size_t validation_samples = 20'000;
  // Fixed W parameter; when set, xi is not used to build the alternative.
  std::optional<double> theta;
};

// Throws ConfigError (with key path) on an invalid configuration.
void validate_config(const ExperimentConfig& cfg);

std::string model_name(ModelKind kind);
ThresholdSchedule default_schedule(const WFamily& family);
// Threshold used at sample size n.
double resolve_threshold(const ExperimentConfig& cfg, std::int64_t n);
std::vector<TestSpec> default_tests(ModelKind kind);
std::vector<TestSpec> effective_tests(const ExperimentConfig& cfg);

// Everything a replication needs for one value of xi.
struct ResolvedCell {
  double xi = 0.0;
  double c = 0.0;
  double theta = 0.0;
  double a = 0.0;
  double b = 0.0;  // B(delta); NaN for the exponential family
  InfLaw law{{{1.0, 1.0}}, 1.0};
  WModel alternative;
  WModel null_model;
};

// Computes c, theta_n and the W laws. Throws ConfigError for an invalid
// config or threshold, ParameterError when theta_n leaves the validity range.
ResolvedCell resolve_cell(const ExperimentConfig& cfg, double xi);

// Asymptotic rejection probability of `test` in the cell's model. Throws
// ConfigError for the optimal delta test under the exponential family.
double asymptotic_prediction(const ExperimentConfig& cfg, const ResolvedCell& cell,
                             const TestSpec& test);

TestOutcome run_test(const TestSpec& test, const ExceedanceSample& sample,
                     const ExperimentConfig& cfg, const ResolvedCell& cell);

struct MCSummary {
  std::string label;
  double xi = 0.0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t replications = 0;
  // Replications the estimate is based on (tau > 0 for abstaining tests).
  std::int64_t r_effective = 0;
  double prediction = 0.0;
  bool within_tolerance = false;
};

// Rejection frequencies of several tests evaluated on the same simulated
// samples. Replication r of cell k uses stream cell_stream_id(k, r).
std::vector<MCSummary> estimate_rejection_rates(const ExperimentConfig& cfg, double xi,
                                                const std::vector<TestSpec>& tests,
                                                std::uint64_t cell = 0);
MCSummary estimate_rejection_rate(const ExperimentConfig& cfg, double xi, const TestSpec& test);

struct PowerRow {
  MCSummary summary;
  // Non-empty when the cell failed; the summary then holds NaN estimates.
  std::string error;
};

// One row per (xi, test), xi-major; failing cells are reported, not thrown.
std::vector<PowerRow> power_curve(const ExperimentConfig& cfg, const std::vector<double>& xis,
                                  const std::vector<TestSpec>& tests);

enum class KsTarget { kOmnibusStatistic, kPooledY };

struct KsSummary {
  // estimate = ci_low = ci_high = D, prediction = 0.
  MCSummary summary;
  double distance = 0.0;
  double critical_value = 0.0;  // 1% level
  double p_value = 1.0;
};

// KS distance of T_{n,c} against Phi, or of the pooled Y against U(0,1),
// under theta = 0 (cfg.xi and cfg.theta are ignored). Throws
// InsufficientDataError for R < 2 or when no replication has an exceedance.
KsSummary ks_uniformity_check(const ExperimentConfig& cfg, KsTarget target);

// Two-sample KS of pooled Y from `simulate` against `simulate_functional` at
// xi = cfg.xi.front(). Needs a generator with a path model.
KsSummary compare_samplers(const ExperimentConfig& cfg);

struct LanSummary {
  MCSummary mean;      // normal-theory CI
  MCSummary variance;  // normal-theory CI
  LanParams predicted;
  bool within_tolerance = false;
};

// Empirical moments of L_{n,c_n}(theta_n | 0) under the null at
// xi = cfg.xi.front(). EvaluationError carries the replication index.
LanSummary lan_empirical_check(const ExperimentConfig& cfg);

// Simulated samples under the cell's alternative, replication r on stream r.
std::vector<ExceedanceSample> simulate_replications(const ExperimentConfig& cfg, double xi);

}  // namespace gpptest
