#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gpptest/random.hpp"

namespace gpptest {

/// Probability law of inf_{t in [0,1]} Z_t for a generator Z.
///
/// Every exceedance statistic depends on the generator only through this
/// law, so it is the interface between generators and the rest of the
/// library. Atoms are kept sorted by value with duplicates merged.
class InfLaw {
 public:
  struct Atom {
    double value;
    double weight;
  };

  // Throws ModelError unless weights are positive and sum to 1 (within
  // 1e-12), atoms lie in [0, bound], and there are at most kMaxAtoms.
  InfLaw(std::vector<Atom> atoms, double bound);

  // Equal-weight empirical law of the given observations.
  static InfLaw empirical(std::vector<double> values, double bound);

  static constexpr std::size_t kMaxAtoms = 1'000'000;

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  // Upper bound m of the generator the law came from.
  double bound() const noexcept { return bound_; }

  // A = E(inf Z).
  double a() const noexcept { return a_; }
  // B(delta) = E((inf Z)^{1+delta}).
  double b(double delta) const;

  // Draws an atom index / value; consumes no randomness when the law is
  // degenerate.
  std::size_t sample_index(RandomStream& rng) const;
  double sample(RandomStream& rng) const { return atoms_[sample_index(rng)].value; }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
  double bound_;
  double a_ = 0.0;
};

struct ConstantGenerator {};

// Z_t = 1 + a sin(2 pi (t + S)) with S uniform on (0,1).
struct SinePhaseGenerator {
  double amplitude = 0.5;
};

// Z = f_J with J uniform on {1..k}; each f_j is tabulated on a common grid
// and interpolated linearly between nodes.
struct FiniteMixtureGenerator {
  std::vector<double> grid;
  std::vector<std::vector<double>> functions;
};

// No path model; only the law of inf Z is known.
struct ExplicitInfLawGenerator {
  std::vector<InfLaw::Atom> atoms;
  double bound = 1.0;
};

using GeneratorModel = std::variant<ConstantGenerator, SinePhaseGenerator,
                                    FiniteMixtureGenerator, ExplicitInfLawGenerator>;

std::string generator_name(const GeneratorModel& gen);

// Bound m with 0 <= Z_t <= m.
double generator_bound(const GeneratorModel& gen);

// Structural checks (amplitude in [0,1], grid sorted in [0,1], mixture mean
// equal to 1 at every node, values nonnegative). Throws ModelError.
void check_generator(const GeneratorModel& gen);

// Exact law of inf Z for every built-in generator. Throws ModelError.
InfLaw inf_law(const GeneratorModel& gen);

// Law of per-path grid minima over `mc_samples` simulated paths on a uniform
// grid of `grid_size` nodes. Grid minima overestimate the infimum for
// generators whose minimum falls between nodes.
InfLaw empirical_inf_law(const GeneratorModel& gen, std::size_t grid_size,
                         std::size_t mc_samples, Seed seed);

std::vector<double> uniform_grid(std::size_t grid_size);

// One realization of Z on `grid` (sorted, within [0,1]).
std::vector<double> sample_path(const GeneratorModel& gen, std::span<const double> grid,
                                RandomStream& rng);

// Deterministic SinePhase path for a given phase S.
std::vector<double> sine_phase_path(double amplitude, double phase,
                                    std::span<const double> grid);

struct ValidationReport {
  std::string generator;
  std::vector<double> grid;
  std::vector<double> mean;            // E(Z_t) per node (analytic or MC)
  std::vector<double> standard_error;  // 0 for analytic means
  bool analytic_means = true;
  double max_mean_deviation = 0.0;     // max_t |E(Z_t) - 1|
  double max_deviation_se = 0.0;       // same, in standard errors (MC only)
  std::size_t bound_violations = 0;    // values outside [0, m]
  double bound = 0.0;
  double a = 0.0;
  bool a_positive = false;
  bool mean_ok = false;
  bool passed = false;
  std::vector<std::string> diagnostics;
};

// Checks E(Z_t) = 1, 0 <= Z_t <= m and A > 0. Violations are reported, not
// thrown; only malformed models (see check_generator) throw.
ValidationReport validate_generator(const GeneratorModel& gen, std::size_t grid_size,
                                    std::size_t mc_samples, Seed seed);

}  // namespace gpptest
