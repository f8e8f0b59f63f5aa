#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "gpptest/exceedance.hpp"
#include "gpptest/generators.hpp"
#include "gpptest/w_models.hpp"

namespace gpptest {

enum class Side { kUpper, kLower };

struct TestOutcome {
  double statistic = 0.0;
  double critical_value = 0.0;  // u_alpha (upper) or -u_alpha (lower)
  double alpha = 0.05;
  bool reject = false;
  double p_value = 1.0;
  Side side = Side::kUpper;
  // No exceedance: the statistic is undefined and the test never rejects.
  bool abstained = false;
  // Number of Y in {0, 1} that were clamped before Phi^{-1} (omnibus only).
  std::size_t clamped = 0;
};

// One-sided decision for a statistic that is N(0,1) under the null.
TestOutcome decide(double statistic, double alpha, Side side);
TestOutcome abstain(double alpha, Side side);

// (tau - n|c|A) / sqrt(n|c|A).
double z_n1(const ExceedanceSample& sample, double a);

// (1+delta) / sqrt(tau) * sum (Y_k^delta - 1/(1+delta)). Throws
// NoExceedanceError when tau = 0.
double z_n2(const ExceedanceSample& sample, double delta);

// sqrt(2 delta + 1) / (1 + delta) * (Z_n1 + Z_n2), the normalized central
// sequence of the delta-neighborhood model.
double central_statistic_delta(const ExceedanceSample& sample, double a, double delta);

// Optimal test of the delta model; abstains when tau = 0.
TestOutcome optimal_test_delta(const ExceedanceSample& sample, double a, double delta,
                               double alpha, Side side);

// Optimal test of the exponential-family model: the count statistic Z_n1.
TestOutcome optimal_test_expfam(const ExceedanceSample& sample, double a, double alpha,
                                Side side);

struct OmnibusStatistic {
  double value;
  std::size_t clamped;
};

// Probabilities are clamped to [1e-15, 1 - 1e-15] before Phi^{-1}.
inline constexpr double kQuantileClamp = 1e-15;

// T = tau^{-1/2} sum Phi^{-1}(Y_k); exactly N(0,1) under the null given
// tau > 0. Throws NoExceedanceError when tau = 0.
OmnibusStatistic omnibus_statistic(const ExceedanceSample& sample);

// Omnibus test; abstains when tau = 0.
TestOutcome omnibus_test(const ExceedanceSample& sample, double alpha, Side side);

/// Exact log-likelihood ratio of the exceedance point process, theta vs 0.
///
/// `family` is a DeltaModel or ExpFamilyModel whose parameter is replaced by
/// `theta` (alternative) and by 0 (null); the exceedance densities come from
/// the discrete inf law, so the value is exact. Throws EvaluationError when a
/// density or exceedance probability is not positive.
double loglik_ratio(const ExceedanceSample& sample, double theta, const WModel& family,
                    const InfLaw& law);

// Same, with the alternative and null models already built (avoids
// rebuilding the exponential-family table per call).
double loglik_ratio(const ExceedanceSample& sample, const WModel& alternative,
                    const WModel& null_model, const InfLaw& law);

enum class TestKind { kOptimalDelta, kOmnibus, kOptimalExpFam };

struct TestSpec {
  TestKind kind = TestKind::kOmnibus;
  Side side = Side::kUpper;

  friend bool operator==(const TestSpec&, const TestSpec&) = default;
};

// "optimal_delta_upper", "omnibus_lower", "optimal_expfam_upper", ...
std::string test_name(const TestSpec& spec);
// Throws ConfigError on an unknown name.
TestSpec parse_test_name(std::string_view name);
// Whether the test abstains on samples without exceedances.
bool test_abstains(TestKind kind);

}  // namespace gpptest
