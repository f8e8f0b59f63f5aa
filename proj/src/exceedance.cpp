#include "gpptest/exceedance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gpptest/errors.hpp"

namespace gpptest {

double ThresholdSchedule::at(std::int64_t n) const {
  if (n < 1) throw ConfigError("threshold schedule needs n >= 1");
  return -c0 * std::pow(static_cast<double>(n), -gamma);
}

ThresholdSchedule default_delta_schedule(double delta) {
  return {0.5, 1.0 / (2.0 * (1.0 + 2.0 * delta))};
}

ThresholdSchedule default_expfam_schedule() { return {0.5, 0.5}; }

bool admissible_for_delta(const ThresholdSchedule& s, double delta) {
  return s.c0 > 0.0 && s.gamma > 0.0 && s.gamma < 1.0 / (1.0 + 2.0 * delta);
}

bool admissible_for_expfam(const ThresholdSchedule& s) {
  return s.c0 > 0.0 && s.gamma > 0.0 && s.gamma < 1.0;
}

void check_threshold(const WModel& w, double bound, double c) {
  if (!(c < 0.0) || !std::isfinite(c)) throw ConfigError("threshold c must be negative");
  const double reach = std::abs(c) * bound;
  if (const auto* d = std::get_if<DeltaModel>(&w)) {
    if (reach > d->u0)
      throw ConfigError("threshold guard: |c| m = " + std::to_string(reach) +
                        " exceeds u0 = " + std::to_string(d->u0));
  } else if (!std::holds_alternative<StdExponential>(w) && reach > 1.0) {
    throw ConfigError("threshold guard: |c| m = " + std::to_string(reach) + " exceeds 1");
  }
}

double reduced_value(double w, double inf_z, double c) {
  if (!(inf_z > 0.0)) return std::numeric_limits<double>::infinity();
  return w / (std::abs(c) * inf_z);
}

ExceedanceSample simulate(std::int64_t n, double c, const WModel& w, const InfLaw& law,
                          RandomStream& rng) {
  if (n < 0) throw ConfigError("n must be >= 0");
  check_threshold(w, law.bound(), c);
  const double abs_c = std::abs(c);

  const auto atoms = law.atoms();
  std::vector<double> accept(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) accept[i] = cdf(w, abs_c * atoms[i].value);

  ExceedanceSample out;
  out.n = n;
  out.c = c;
  if (atoms.size() == 1) {
    const double z = atoms.front().value;
    const double threshold = accept.front();
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      if (u <= threshold) out.ys.push_back(std::min(1.0, reduced_value(quantile(w, u), z, c)));
    }
    return out;
  }

  for (std::int64_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const std::size_t k = law.sample_index(rng);
    const double z = atoms[k].value;
    if (u <= accept[k]) out.ys.push_back(std::min(1.0, reduced_value(quantile(w, u), z, c)));
  }
  return out;
}

double sup_ratio(std::span<const double> path, double c) {
  double best = -std::numeric_limits<double>::infinity();
  for (double x : path) best = std::max(best, x / c);
  return best;
}

std::vector<double> gpp_path(double w, std::span<const double> z_path, double clip) {
  std::vector<double> x;
  x.reserve(z_path.size());
  for (double z : z_path) x.push_back(z > 0.0 ? std::max(-w / z, clip) : clip);
  return x;
}

ExceedanceSample simulate_functional(std::int64_t n, double c, const WModel& w,
                                     const GeneratorModel& gen, std::span<const double> grid,
                                     double clip, RandomStream& rng) {
  if (n < 0) throw ConfigError("n must be >= 0");
  if (!(clip < c)) throw ConfigError("clip level M must lie below the threshold c");
  check_generator(gen);
  const double bound = generator_bound(gen);
  check_threshold(w, bound, c);

  ExceedanceSample out;
  out.n = n;
  out.c = c;
  const double reach = std::abs(c) * bound;
  for (std::int64_t i = 0; i < n; ++i) {
    const double wv = sample(w, rng);
    // W > |c| m puts every X_t below c whatever the path; skip building it.
    if (wv > reach) continue;
    const auto z = sample_path(gen, grid, rng);
    const double y = sup_ratio(gpp_path(wv, z, clip), c);
    if (y <= 1.0) out.ys.push_back(y);
  }
  return out;
}

double exceedance_probability(const WModel& w, const InfLaw& law, double c) {
  check_threshold(w, law.bound(), c);
  const double abs_c = std::abs(c);
  double p = 0.0;
  for (const auto& a : law.atoms()) p += a.weight * cdf(w, abs_c * a.value);
  return p;
}

double exceedance_density(const WModel& w, const InfLaw& law, double c, double u) {
  check_threshold(w, law.bound(), c);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("exceedance_density: u must lie in [0,1]");
  const double abs_c = std::abs(c);
  double sum = 0.0;
  for (const auto& a : law.atoms()) sum += a.weight * a.value * density(w, abs_c * a.value * u);
  return abs_c * sum;
}

}  // namespace gpptest
