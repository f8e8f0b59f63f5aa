#include "gpptest/w_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gpptest/errors.hpp"

namespace gpptest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kGlNodes = {
    -0.9061798459386639927976269, -0.5384693101056830910363144, 0.0,
    0.5384693101056830910363144, 0.9061798459386639927976269};
constexpr std::array<double, 5> kGlWeights = {
    0.2369268850561890875142640, 0.4786286704993664680412915,
    0.5688888888888888888888889, 0.4786286704993664680412915,
    0.2369268850561890875142640};

double delta_lower_cdf(const DeltaModel& m, double u) {
  return u + m.theta * std::pow(u, 1.0 + m.delta) / (1.0 + m.delta);
}

double delta_quantile(const DeltaModel& m, double p) {
  if (m.theta == 0.0) return p;
  const double h_u0 = delta_lower_cdf(m, m.u0);
  if (p > h_u0) {
    const double tail = m.tail_density();
    if (tail <= 0.0) return m.u0;
    return std::min(1.0, m.u0 + (p - h_u0) / tail);
  }
  if (m.delta == 1.0) {
    // Root of theta/2 u^2 + u - p = 0 in cancellation-free form.
    return 2.0 * p / (1.0 + std::sqrt(1.0 + 2.0 * m.theta * p));
  }
  // Safeguarded Newton on the increasing lower-branch cdf.
  double lo = 0.0;
  double hi = m.u0;
  double u = std::clamp(p, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double g = delta_lower_cdf(m, u) - p;
    if (g > 0.0)
      hi = u;
    else
      lo = u;
    const double d = 1.0 + m.theta * std::pow(u, m.delta);
    double next = (d > 0.0) ? u - g / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-15 || hi - lo <= 1e-15) return next;
    u = next;
  }
  return u;
}

}  // namespace

double DeltaModel::tail_density() const {
  return (1.0 - u0 - theta * std::pow(u0, 1.0 + delta) / (1.0 + delta)) / (1.0 - u0);
}

void DeltaModel::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw ModelError("delta model: delta must lie in (0,1]");
  if (!(u0 > 0.0 && u0 < 1.0)) throw ModelError("delta model: u0 must lie in (0,1)");
  if (!std::isfinite(theta)) throw ModelError("delta model: theta must be finite");
  const auto [lo, hi] = validity_range(*this);
  if (theta < lo || theta > hi)
    throw ModelError("delta model: theta=" + std::to_string(theta) + " outside [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

std::pair<double, double> validity_range(const DeltaModel& model) {
  const double lower = -std::pow(model.u0, -model.delta);
  const double upper =
      (1.0 - model.u0) * (1.0 + model.delta) / std::pow(model.u0, 1.0 + model.delta);
  return {lower, upper};
}

StatisticT StatisticT::identity() { return StatisticT{}; }

StatisticT StatisticT::plateau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ModelError("plateau T: tau must lie in (0,1]");
  StatisticT t;
  t.kind_ = Kind::kPlateau;
  t.tau_ = tau;
  return t;
}

StatisticT StatisticT::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ModelError("tabulated T needs >= 2 points");
  if (points.front().first != 0.0 || points.back().first != 1.0)
    throw ModelError("tabulated T must span u in [0,1]");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
      throw ModelError("tabulated T has non-finite entries");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw ModelError("tabulated T: u must increase strictly");
  }
  StatisticT t;
  t.kind_ = Kind::kTabulated;
  t.points_ = std::move(points);
  return t;
}

double StatisticT::operator()(double u) const {
  switch (kind_) {
    case Kind::kIdentity:
      return u;
    case Kind::kPlateau:
      return std::min(u, tau_);
    case Kind::kTabulated:
      break;
  }
  if (u <= points_.front().first) return points_.front().second;
  if (u >= points_.back().first) return points_.back().second;
  const auto it = std::upper_bound(points_.begin(), points_.end(), u,
                                   [](double x, const auto& p) { return x < p.first; });
  const auto& [u1, t1] = *it;
  const auto& [u0, t0] = *(it - 1);
  return t0 + (u - u0) / (u1 - u0) * (t1 - t0);
}

double StatisticT::limit_at_zero() const {
  return kind_ == Kind::kTabulated ? points_.front().second : 0.0;
}

double StatisticT::integral() const {
  switch (kind_) {
    case Kind::kIdentity:
      return 0.5;
    case Kind::kPlateau:
      return tau_ - 0.5 * tau_ * tau_;
    case Kind::kTabulated:
      break;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i)
    sum += 0.5 * (points_[i].second + points_[i - 1].second) *
           (points_[i].first - points_[i - 1].first);
  return sum;
}

ExpFamilyModel::ExpFamilyModel(StatisticT t, double theta) : t_(std::move(t)), theta_(theta) {
  if (!std::isfinite(theta)) throw ModelError("exp family: theta must be finite");
  auto table = std::make_shared<Table>();
  table->cdf.resize(kTableCells + 1);
  table->cdf[0] = 0.0;
  double acc = 0.0;
  for (int i = 0; i < kTableCells; ++i) {
    acc += unnormalized_mass(static_cast<double>(i) / kTableCells,
                             static_cast<double>(i + 1) / kTableCells);
    table->cdf[i + 1] = acc;
  }
  if (!(acc > 0.0) || !std::isfinite(acc))
    throw ModelError("exp family: normalizing integral is not finite");
  for (double& v : table->cdf) v /= acc;
  table->cdf.back() = 1.0;
  table->normalizer = 1.0 / acc;
  table_ = std::move(table);
}

double ExpFamilyModel::unnormalized_mass(double a, double b) const {
  if (!(b > a)) return 0.0;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGlNodes.size(); ++k)
    sum += kGlWeights[k] * std::exp(theta_ * t_(mid + half * kGlNodes[k]));
  return half * sum;
}

double ExpFamilyModel::density(double u) const {
  return table_->normalizer * std::exp(theta_ * t_(u));
}

double ExpFamilyModel::cdf(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const int cell = std::min(kTableCells - 1, static_cast<int>(u * kTableCells));
  const double left = static_cast<double>(cell) / kTableCells;
  const double value = table_->cdf[cell] + table_->normalizer * unnormalized_mass(left, u);
  return std::min(value, table_->cdf[cell + 1]);
}

double ExpFamilyModel::quantile(double p) const {
  if (theta_ == 0.0) return p;
  const auto& tab = table_->cdf;
  const auto it = std::upper_bound(tab.begin(), tab.end(), p);
  int cell = static_cast<int>(it - tab.begin()) - 1;
  cell = std::clamp(cell, 0, kTableCells - 1);
  double lo = static_cast<double>(cell) / kTableCells;
  double hi = static_cast<double>(cell + 1) / kTableCells;
  double u = lo + (hi - lo) * (p - tab[cell]) / std::max(tab[cell + 1] - tab[cell], 1e-300);
  u = std::clamp(u, lo, hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double g = cdf(u) - p;
    if (g > 0.0)
      hi = u;
    else
      lo = u;
    const double d = density(u);
    double next = (d > 0.0) ? u - g / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-15 || hi - lo <= 1e-15) return next;
    u = next;
  }
  return u;
}

std::string w_model_name(const WModel& model) {
  return std::visit(overloaded{
                        [](const Uniform01&) { return std::string("uniform"); },
                        [](const DeltaModel&) { return std::string("delta"); },
                        [](const StdExponential&) { return std::string("std_exponential"); },
                        [](const ExpFamilyModel&) { return std::string("expfam"); },
                    },
                    model);
}

double support_upper(const WModel& model) {
  return std::holds_alternative<StdExponential>(model)
             ? std::numeric_limits<double>::infinity()
             : 1.0;
}

double density(const WModel& model, double u) {
  if (!(u >= 0.0 && u <= support_upper(model)))
    throw DomainError("density: u=" + std::to_string(u) + " outside the support of " +
                      w_model_name(model));
  return std::visit(overloaded{
                        [](const Uniform01&) { return 1.0; },
                        [u](const DeltaModel& m) {
                          if (u <= m.u0) return 1.0 + m.theta * std::pow(u, m.delta);
                          return m.tail_density();
                        },
                        [u](const StdExponential&) { return std::exp(-u); },
                        [u](const ExpFamilyModel& m) { return m.density(u); },
                    },
                    model);
}

double cdf(const WModel& model, double u) {
  if (!(u > 0.0)) return 0.0;
  return std::visit(overloaded{
                        [u](const Uniform01&) { return std::min(u, 1.0); },
                        [u](const DeltaModel& m) {
                          if (u <= m.u0) return delta_lower_cdf(m, u);
                          if (u >= 1.0) return 1.0;
                          return delta_lower_cdf(m, m.u0) + m.tail_density() * (u - m.u0);
                        },
                        [u](const StdExponential&) { return -std::expm1(-u); },
                        [u](const ExpFamilyModel& m) { return m.cdf(u); },
                    },
                    model);
}

double quantile(const WModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
  return std::visit(overloaded{
                        [p](const Uniform01&) { return p; },
                        [p](const DeltaModel& m) { return delta_quantile(m, p); },
                        [p](const StdExponential&) { return -std::log1p(-p); },
                        [p](const ExpFamilyModel& m) { return m.quantile(p); },
                    },
                    model);
}

double sample(const WModel& model, RandomStream& rng) {
  return quantile(model, rng.uniform());
}

WModel with_theta(const WModel& model, double theta) {
  return std::visit(overloaded{
                        [](const Uniform01&) -> WModel {
                          throw ModelError("uniform W model has no parameter");
                        },
                        [theta](const DeltaModel& m) -> WModel {
                          DeltaModel copy = m;
                          copy.theta = theta;
                          copy.validate();
                          return copy;
                        },
                        [](const StdExponential&) -> WModel {
                          throw ModelError("std_exponential W model has no parameter");
                        },
                        [theta](const ExpFamilyModel& m) -> WModel {
                          if (theta == m.theta()) return m;
                          return ExpFamilyModel(m.statistic(), theta);
                        },
                    },
                    model);
}

double model_theta(const WModel& model) {
  return std::visit(overloaded{
                        [](const Uniform01&) { return 0.0; },
                        [](const DeltaModel& m) { return m.theta; },
                        [](const StdExponential&) { return -1.0; },
                        [](const ExpFamilyModel& m) { return m.theta(); },
                    },
                    model);
}

}  // namespace gpptest
