#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gpptest/random.hpp"

namespace gpptest {

/// Delta-neighborhood of the uniform law.
///
/// The density is exactly 1 + theta u^delta on [0, u0]; on (u0, 1] it is the
/// constant that restores total mass 1. The lower tail therefore carries the
/// expansion with no remainder as long as thresholds stay inside [0, u0].
struct DeltaModel {
  double delta = 1.0;
  double theta = 0.0;
  double u0 = 0.5;

  // Constant density on (u0, 1].
  double tail_density() const;
  // Throws ModelError if delta, u0 or theta are out of range.
  void validate() const;
};

// Closed interval of theta keeping the DeltaModel density nonnegative.
std::pair<double, double> validity_range(const DeltaModel& model);

/// Sufficient statistic T of the exponential family h(u) = C(theta) exp(theta T(u)).
class StatisticT {
 public:
  // T(u) = u.
  static StatisticT identity();
  // T(u) = min(u, tau), tau in (0, 1].
  static StatisticT plateau(double tau);
  // Piecewise-linear through (u_i, T_i); u must start at 0, end at 1 and
  // increase strictly.
  static StatisticT tabulated(std::vector<std::pair<double, double>> points);

  double operator()(double u) const;
  // lim_{u -> 0} T(u).
  double limit_at_zero() const;
  // Integral of T over [0, 1].
  double integral() const;

  enum class Kind { kIdentity, kPlateau, kTabulated };
  Kind kind() const noexcept { return kind_; }
  double tau() const noexcept { return tau_; }
  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

 private:
  Kind kind_ = Kind::kIdentity;
  double tau_ = 1.0;
  std::vector<std::pair<double, double>> points_;
};

/// Exponential-family law on [0, 1] with a cached cdf table.
///
/// The table holds the cdf at 4096 equispaced nodes; within a cell the cdf is
/// completed by 5-point Gauss-Legendre integration of the density, which keeps
/// it monotone and accurate well below 1e-8.
class ExpFamilyModel {
 public:
  ExpFamilyModel(StatisticT t, double theta);

  static constexpr int kTableCells = 4096;

  const StatisticT& statistic() const noexcept { return t_; }
  double theta() const noexcept { return theta_; }
  // C(theta) = 1 / integral of exp(theta T).
  double normalizer() const noexcept { return table_->normalizer; }
  double c_limit() const { return t_.limit_at_zero(); }
  double int_t() const { return t_.integral(); }

  double density(double u) const;
  double cdf(double u) const;
  double quantile(double p) const;

 private:
  struct Table {
    double normalizer = 1.0;
    std::vector<double> cdf;  // kTableCells + 1 entries
  };
  double unnormalized_mass(double a, double b) const;

  StatisticT t_;
  double theta_;
  std::shared_ptr<const Table> table_;
};

struct Uniform01 {};
struct StdExponential {};

using WModel = std::variant<Uniform01, DeltaModel, StdExponential, ExpFamilyModel>;

std::string w_model_name(const WModel& model);

// Upper end of the support (infinity for StdExponential).
double support_upper(const WModel& model);

// Throws DomainError outside the support.
double density(const WModel& model, double u);
// H(u); 0 for u <= 0 and 1 beyond a bounded support.
double cdf(const WModel& model, double u);
// Inverse cdf, p in (0, 1).
double quantile(const WModel& model, double p);
double sample(const WModel& model, RandomStream& rng);

// Same family with a different parameter. Throws ModelError for the
// parameter-free models (Uniform01, StdExponential).
WModel with_theta(const WModel& model, double theta);

// Parameter of the model (0 for Uniform01, -1 for StdExponential which sits
// in the delta = 1 neighborhood with theta = -1).
double model_theta(const WModel& model);

}  // namespace gpptest
