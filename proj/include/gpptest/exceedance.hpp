#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gpptest/generators.hpp"
#include "gpptest/random.hpp"
#include "gpptest/w_models.hpp"

namespace gpptest {

// Realization of the exceedance point process among n observations above the
// constant threshold c < 0: the count tau and the values Y_k = sup_t X_t / c
// in [0, 1], in the order the observations were drawn.
struct ExceedanceSample {
  std::int64_t n = 0;
  double c = -1.0;
  std::vector<double> ys;

  std::int64_t tau() const noexcept { return static_cast<std::int64_t>(ys.size()); }
};

// c_n = -c0 * n^{-gamma}.
struct ThresholdSchedule {
  double c0 = 0.5;
  double gamma = 1.0 / 6.0;

  double at(std::int64_t n) const;
};

// Halfway to the admissibility boundary gamma < 1/(1+2 delta).
ThresholdSchedule default_delta_schedule(double delta);
// Halfway to the admissibility boundary gamma < 1.
ThresholdSchedule default_expfam_schedule();

// n|c_n|^{1+2 delta} -> infinity.
bool admissible_for_delta(const ThresholdSchedule& s, double delta);
// n|c_n| -> infinity.
bool admissible_for_expfam(const ThresholdSchedule& s);

// Throws ConfigError unless c < 0 and |c| m stays inside the region where
// the W density is known exactly: [0, u0] for DeltaModel, [0, 1] for the
// other bounded models.
void check_threshold(const WModel& w, double bound, double c);

// Y' = W / (|c| I); +infinity when I = 0 (never an exceedance).
double reduced_value(double w, double inf_z, double c);

/// Reduced sampler: for each observation draw W from `w` and I from `law`;
/// the observation exceeds c iff Y' = W / (|c| I) <= 1, and Y' is recorded.
///
/// Since W = H^{-1}(U), the test W <= |c| I is carried out as U <= H(|c| I)
/// with H(|c| z) precomputed per atom; W is only inverted on exceedances.
ExceedanceSample simulate(std::int64_t n, double c, const WModel& w, const InfLaw& law,
                          RandomStream& rng);

// sup_t X_t / c for a path X on a grid (c < 0).
double sup_ratio(std::span<const double> path, double c);

// X_t = max(-W / Z_t, M), with Z_t = 0 mapped to M.
std::vector<double> gpp_path(double w, std::span<const double> z_path, double clip);

/// Path-level sampler used to validate `simulate`: builds X on `grid` from a
/// generator path and applies the pointwise exceedance definition.
/// Requires M < c < 0.
ExceedanceSample simulate_functional(std::int64_t n, double c, const WModel& w,
                                     const GeneratorModel& gen, std::span<const double> grid,
                                     double clip, RandomStream& rng);

// P(X >= c) = sum_i p_i H(|c| z_i).
double exceedance_probability(const WModel& w, const InfLaw& law, double c);

// f_c(u) = |c| sum_i p_i z_i h(|c| z_i u), the density of sup_t X_t / c on [0,1].
double exceedance_density(const WModel& w, const InfLaw& law, double c, double u);

}  // namespace gpptest
