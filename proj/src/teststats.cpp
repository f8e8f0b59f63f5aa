#include "gpptest/teststats.hpp"

#include <algorithm>
#include <cmath>

#include "gpptest/errors.hpp"
#include "gpptest/special_functions.hpp"

namespace gpptest {

TestOutcome decide(double statistic, double alpha, Side side) {
  const double u_alpha = upper_critical_value(alpha);
  TestOutcome out;
  out.statistic = statistic;
  out.alpha = alpha;
  out.side = side;
  if (side == Side::kUpper) {
    out.critical_value = u_alpha;
    out.reject = statistic > u_alpha;
    out.p_value = std_normal_cdf(-statistic);
  } else {
    out.critical_value = -u_alpha;
    out.reject = statistic < -u_alpha;
    out.p_value = std_normal_cdf(statistic);
  }
  return out;
}

TestOutcome abstain(double alpha, Side side) {
  TestOutcome out = decide(0.0, alpha, side);
  out.statistic = std::nan("");
  out.reject = false;
  out.p_value = 1.0;
  out.abstained = true;
  return out;
}

double z_n1(const ExceedanceSample& sample, double a) {
  const double expected = static_cast<double>(sample.n) * std::abs(sample.c) * a;
  if (!(expected > 0.0)) throw DomainError("z_n1: n |c| A must be positive");
  return (static_cast<double>(sample.tau()) - expected) / std::sqrt(expected);
}

double z_n2(const ExceedanceSample& sample, double delta) {
  if (sample.tau() == 0) throw NoExceedanceError("z_n2: no exceedances");
  const double centre = 1.0 / (1.0 + delta);
  double sum = 0.0;
  for (double y : sample.ys) sum += std::pow(y, delta) - centre;
  return (1.0 + delta) / std::sqrt(static_cast<double>(sample.tau())) * sum;
}

double central_statistic_delta(const ExceedanceSample& sample, double a, double delta) {
  return std::sqrt(2.0 * delta + 1.0) / (1.0 + delta) *
         (z_n1(sample, a) + z_n2(sample, delta));
}

TestOutcome optimal_test_delta(const ExceedanceSample& sample, double a, double delta,
                               double alpha, Side side) {
  if (sample.tau() == 0) return abstain(alpha, side);
  return decide(central_statistic_delta(sample, a, delta), alpha, side);
}

TestOutcome optimal_test_expfam(const ExceedanceSample& sample, double a, double alpha,
                                Side side) {
  return decide(z_n1(sample, a), alpha, side);
}

OmnibusStatistic omnibus_statistic(const ExceedanceSample& sample) {
  if (sample.tau() == 0) throw NoExceedanceError("omnibus statistic: no exceedances");
  double sum = 0.0;
  std::size_t clamped = 0;
  for (double y : sample.ys) {
    double p = y;
    if (p < kQuantileClamp || p > 1.0 - kQuantileClamp) {
      p = std::clamp(p, kQuantileClamp, 1.0 - kQuantileClamp);
      ++clamped;
    }
    sum += std_normal_quantile(p);
  }
  return {sum / std::sqrt(static_cast<double>(sample.tau())), clamped};
}

TestOutcome omnibus_test(const ExceedanceSample& sample, double alpha, Side side) {
  if (sample.tau() == 0) return abstain(alpha, side);
  const auto stat = omnibus_statistic(sample);
  TestOutcome out = decide(stat.value, alpha, side);
  out.clamped = stat.clamped;
  return out;
}

namespace {

double checked_log(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw EvaluationError(std::string("loglik_ratio: nonpositive ") + what);
  return std::log(x);
}

}  // namespace

double loglik_ratio(const ExceedanceSample& sample, const WModel& alternative,
                    const WModel& null_model, const InfLaw& law) {
  const double c = sample.c;
  const double p_alt = exceedance_probability(alternative, law, c);
  const double p_null = exceedance_probability(null_model, law, c);
  const double log_p_ratio = checked_log(p_alt, "exceedance probability") -
                             checked_log(p_null, "null exceedance probability");

  double sum = 0.0;
  for (double y : sample.ys) {
    const double f_alt = exceedance_density(alternative, law, c, y);
    const double f_null = exceedance_density(null_model, law, c, y);
    sum += checked_log(f_alt, "exceedance density") - checked_log(f_null, "null density") -
           log_p_ratio;
  }
  const double tau = static_cast<double>(sample.tau());
  const double misses = static_cast<double>(sample.n) - tau;
  double tail = 0.0;
  if (misses > 0.0) {
    if (!(p_alt < 1.0))
      throw EvaluationError("loglik_ratio: alternative exceedance probability is 1");
    tail = misses * (std::log1p(-p_alt) - std::log1p(-p_null));
  }
  return sum + tau * log_p_ratio + tail;
}

double loglik_ratio(const ExceedanceSample& sample, double theta, const WModel& family,
                    const InfLaw& law) {
  return loglik_ratio(sample, with_theta(family, theta), with_theta(family, 0.0), law);
}

std::string test_name(const TestSpec& spec) {
  std::string base;
  switch (spec.kind) {
    case TestKind::kOptimalDelta:
      base = "optimal_delta";
      break;
    case TestKind::kOmnibus:
      base = "omnibus";
      break;
    case TestKind::kOptimalExpFam:
      base = "optimal_expfam";
      break;
  }
  return base + (spec.side == Side::kUpper ? "_upper" : "_lower");
}

TestSpec parse_test_name(std::string_view name) {
  for (auto kind : {TestKind::kOptimalDelta, TestKind::kOmnibus, TestKind::kOptimalExpFam})
    for (auto side : {Side::kUpper, Side::kLower})
      if (test_name({kind, side}) == name) return {kind, side};
  throw ConfigError("unknown test '" + std::string(name) + "'");
}

bool test_abstains(TestKind kind) { return kind != TestKind::kOptimalExpFam; }

}  // namespace gpptest
