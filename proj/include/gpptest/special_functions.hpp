#pragma once

#include <functional>

namespace gpptest {

struct QuadratureSettings {
  double abs_tol = 1e-10;
  int max_depth = 40;
  // Improper integrals over the real line are truncated to [-hw, hw].
  double domain_halfwidth = 10.0;

  // Throws DomainError when abs_tol <= 0, max_depth < 1 or halfwidth < 6.
  void validate() const;
};

double std_normal_pdf(double x);

// Phi(x), evaluated through erfc so that both tails keep relative accuracy.
double std_normal_cdf(double x);

// Phi^{-1}(p) for p in (0, 1): Acklam's rational approximation followed by
// one Newton step against std_normal_cdf. Throws DomainError otherwise.
// Exactly antisymmetric: quantile(p) == -quantile(1 - p) whenever 1 - p is
// computed exactly.
double std_normal_quantile(double p);

// u_alpha = Phi^{-1}(1 - alpha).
double upper_critical_value(double alpha);

/// Adaptive Simpson quadrature of `f` over [a, b].
///
/// The interval is first split into 16 panels so that symmetric or
/// oscillating integrands cannot fool the initial error estimate; each panel
/// is then refined until the Richardson-corrected error estimate falls below
/// its share of `abs_tol`. Throws ConvergenceError (with the best estimate
/// attached) when any panel needs more than `max_depth` bisections.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSettings& settings = {});

// psi(delta) = integral of x * Phi(x)^delta * phi(x) over the real line,
// the drift constant of the omnibus statistic. psi(0) == 0 exactly.
double psi(double delta, const QuadratureSettings& settings = {});

}  // namespace gpptest
