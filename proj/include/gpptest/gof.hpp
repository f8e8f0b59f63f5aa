#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gpptest {

// sup_x |F_n(x) - F(x)| for the empirical cdf of `samples`.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// sup_x |F_n(x) - G_m(x)| for two empirical cdfs.
double ks_two_sample_distance(std::vector<double> a, std::vector<double> b);

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

// Asymptotic p-value of a one-sample KS distance with Stephens' finite-n
// correction; for two samples pass the effective size n m / (n + m).
double ks_p_value(double distance, double effective_n);

// 1% critical value 1.63 / sqrt(n).
double ks_critical_value_1pct(double effective_n);

struct Interval {
  double low;
  double high;
};

// Wilson score interval for a binomial proportion at two-sided `confidence`.
Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence = 0.99);

}  // namespace gpptest
