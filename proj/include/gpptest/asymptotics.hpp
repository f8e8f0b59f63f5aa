#pragma once

#include <cstdint>

namespace gpptest {

// Limit law N(mean, sigma2) of the log-likelihood ratio under the null
// (mean_h0 = -sigma2/2) and under the local alternative (mean_h1 = +sigma2/2).
struct LanParams {
  double sigma2 = 0.0;
  double mean_h0 = 0.0;
  double mean_h1 = 0.0;
  // xi = 0: the alternative coincides with the null.
  bool degenerate = true;
};

// Local alternative of the delta model: xi / sqrt(n |c|^{1+2 delta}).
double theta_n_delta(double xi, std::int64_t n, double c, double delta);

// Local alternative of the exponential family:
// xi / (sqrt(n |c|) sqrt(A) (C - int T)). Throws ModelError when C == int T.
double theta_n_expfam(double xi, std::int64_t n, double c, double a, double c_limit,
                      double int_t);

// Drift of the optimal delta-model statistic: xi B / (sqrt(A) sqrt(2 delta + 1)).
double drift_optimal_delta(double xi, double a, double b, double delta);
// Drift of the omnibus statistic in the delta model: xi B psi(delta) / sqrt(A).
double drift_omnibus_delta(double xi, double a, double b, double delta);

// Memoized psi(delta) with default quadrature settings.
double psi_cached(double delta);

// Rejection probability of a one-sided level-alpha test whose statistic is
// asymptotically N(drift, 1).
double rejection_probability(double drift, double alpha, bool upper);

// 1 - Phi(u_alpha - |xi| B / (sqrt(A) sqrt(2 delta + 1))).
double power_optimal_delta(double xi, double a, double b, double delta, double alpha);
// 1 - Phi(u_alpha - |xi| B psi(delta) / sqrt(A)).
double power_omnibus_delta(double xi, double a, double b, double delta, double alpha);
// 1 - Phi(u_alpha - |xi|).
double power_optimal_expfam(double xi, double alpha);

// Asymptotic relative efficiency of the omnibus test: (2 delta + 1) psi(delta)^2.
double are_delta(double delta);

LanParams lan_params_delta(double xi, double a, double b, double delta);
LanParams lan_params_expfam(double xi);

// Limit law of Z_n1 + Z_n2 under the local alternative.
struct NormalLimit {
  double mean;
  double variance;
};
NormalLimit central_sequence_alternative(double xi, double a, double b, double delta);

}  // namespace gpptest
