#include "gpptest/asymptotics.hpp"

#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "gpptest/errors.hpp"
#include "gpptest/special_functions.hpp"

namespace gpptest {

namespace {

void require_positive(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("A and B must be positive");
}

}  // namespace

double theta_n_delta(double xi, std::int64_t n, double c, double delta) {
  if (n < 1) throw DomainError("theta_n: n must be >= 1");
  if (!(c < 0.0)) throw DomainError("theta_n: c must be negative");
  return xi / std::sqrt(static_cast<double>(n) * std::pow(std::abs(c), 1.0 + 2.0 * delta));
}

double theta_n_expfam(double xi, std::int64_t n, double c, double a, double c_limit,
                      double int_t) {
  if (n < 1) throw DomainError("theta_n: n must be >= 1");
  if (!(c < 0.0)) throw DomainError("theta_n: c must be negative");
  if (!(a > 0.0)) throw DomainError("theta_n: A must be positive");
  if (c_limit == int_t)
    throw ModelError("exponential family is degenerate: lim T(0+) equals the integral of T");
  return xi / (std::sqrt(static_cast<double>(n) * std::abs(c)) * std::sqrt(a) *
               (c_limit - int_t));
}

double drift_optimal_delta(double xi, double a, double b, double delta) {
  require_positive(a, b);
  return xi * b / (std::sqrt(a) * std::sqrt(2.0 * delta + 1.0));
}

double drift_omnibus_delta(double xi, double a, double b, double delta) {
  require_positive(a, b);
  return xi * b * psi_cached(delta) / std::sqrt(a);
}

double psi_cached(double delta) {
  static std::shared_mutex mutex;
  static std::unordered_map<double, double> memo;
  {
    std::shared_lock lock(mutex);
    if (const auto it = memo.find(delta); it != memo.end()) return it->second;
  }
  const double value = psi(delta);
  std::unique_lock lock(mutex);
  memo.emplace(delta, value);
  return value;
}

double rejection_probability(double drift, double alpha, bool upper) {
  const double u_alpha = upper_critical_value(alpha);
  // Phi(-Phi^{-1}(1 - alpha)) only reproduces alpha to rounding.
  if (drift == 0.0) return alpha;
  return upper ? std_normal_cdf(drift - u_alpha) : std_normal_cdf(-u_alpha - drift);
}

double power_optimal_delta(double xi, double a, double b, double delta, double alpha) {
  return rejection_probability(drift_optimal_delta(std::abs(xi), a, b, delta), alpha, true);
}

double power_omnibus_delta(double xi, double a, double b, double delta, double alpha) {
  return rejection_probability(drift_omnibus_delta(std::abs(xi), a, b, delta), alpha, true);
}

double power_optimal_expfam(double xi, double alpha) {
  return rejection_probability(std::abs(xi), alpha, true);
}

double are_delta(double delta) {
  if (!(delta >= 0.0)) throw DomainError("are_delta: delta must be >= 0");
  const double p = psi_cached(delta);
  return (2.0 * delta + 1.0) * p * p;
}

LanParams lan_params_delta(double xi, double a, double b, double delta) {
  require_positive(a, b);
  LanParams out;
  out.sigma2 = xi * xi * b * b / (a * (2.0 * delta + 1.0));
  out.mean_h0 = -0.5 * out.sigma2;
  out.mean_h1 = 0.5 * out.sigma2;
  out.degenerate = out.sigma2 == 0.0;
  return out;
}

LanParams lan_params_expfam(double xi) {
  LanParams out;
  out.sigma2 = xi * xi;
  out.mean_h0 = -0.5 * out.sigma2;
  out.mean_h1 = 0.5 * out.sigma2;
  out.degenerate = out.sigma2 == 0.0;
  return out;
}

NormalLimit central_sequence_alternative(double xi, double a, double b, double delta) {
  require_positive(a, b);
  return {xi * b * (1.0 + delta) / (std::sqrt(a) * (2.0 * delta + 1.0)),
          (1.0 + delta) * (1.0 + delta) / (2.0 * delta + 1.0)};
}

}  // namespace gpptest
