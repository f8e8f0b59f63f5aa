#include "gpptest/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpptest/errors.hpp"

namespace gpptest {

void QuadratureSettings::validate() const {
  if (!(abs_tol > 0.0)) throw DomainError("quadrature abs_tol must be > 0");
  if (max_depth < 1) throw DomainError("quadrature max_depth must be >= 1");
  if (!(domain_halfwidth >= 6.0))
    throw DomainError("quadrature domain_halfwidth must be >= 6");
}

double std_normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's approximation for the lower half, p in (0, 0.5].
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double quantile_lower(double p) {
  double x = acklam_lower(p);
  const double density = std_normal_pdf(x);
  if (density > 0.0) x -= (std_normal_cdf(x) - p) / density;
  return x;
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("std_normal_quantile: p must lie in (0,1), got " +
                      std::to_string(p));
  if (p > 0.5) return -quantile_lower(1.0 - p);
  return quantile_lower(p);
}

double upper_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("alpha must lie in (0,1)");
  return -std_normal_quantile(alpha);
}

namespace {

struct SimpsonPanel {
  double a, fa, m, fm, b, fb, whole;
};

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const std::function<double(double)>& f, const SimpsonPanel& p,
              double tol, int depth_left, bool& converged) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.fa, flm, p.m, p.fm);
  const double right = simpson(p.m, p.fm, frm, p.b, p.fb);
  const double delta = left + right - p.whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth_left <= 0) {
    converged = false;
    return left + right + delta / 15.0;
  }
  const SimpsonPanel lp{p.a, p.fa, lm, flm, p.m, p.fm, left};
  const SimpsonPanel rp{p.m, p.fm, rm, frm, p.b, p.fb, right};
  return refine(f, lp, 0.5 * tol, depth_left - 1, converged) +
         refine(f, rp, 0.5 * tol, depth_left - 1, converged);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSettings& settings) {
  settings.validate();
  if (!(a < b)) throw DomainError("integrate: requires a < b");

  constexpr int panels = 16;
  const double h = (b - a) / panels;
  const double panel_tol = settings.abs_tol / panels;
  double total = 0.0;
  bool converged = true;
  double left = a;
  double f_left = f(left);
  for (int i = 0; i < panels; ++i) {
    const double right = (i + 1 == panels) ? b : a + (i + 1) * h;
    const double mid = 0.5 * (left + right);
    const double f_mid = f(mid);
    const double f_right = f(right);
    const SimpsonPanel panel{left, f_left, mid, f_mid, right, f_right,
                             simpson(left, f_left, f_mid, right, f_right)};
    total += refine(f, panel, panel_tol, settings.max_depth, converged);
    left = right;
    f_left = f_right;
  }
  if (!converged)
    throw ConvergenceError("integrate: max_depth exceeded before reaching abs_tol",
                           total);
  return total;
}

double psi(double delta, const QuadratureSettings& settings) {
  if (!(delta >= 0.0)) throw DomainError("psi: delta must be >= 0");
  // Odd integrand; the quadrature would return rounding noise instead.
  if (delta == 0.0) return 0.0;
  const double hw = settings.domain_halfwidth;
  return integrate(
      [delta](double x) {
        return x * std::pow(std_normal_cdf(x), delta) * std_normal_pdf(x);
      },
      -hw, hw, settings);
}

}  // namespace gpptest
