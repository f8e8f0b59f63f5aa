#include "gpptest/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gpptest/errors.hpp"

namespace gpptest {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kWeightTol = 1e-12;
constexpr double kMixtureMeanTol = 1e-9;

double interpolate(std::span<const double> grid, std::span<const double> values,
                   double t) {
  if (t <= grid.front()) return values.front();
  if (t >= grid.back()) return values.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

// Malformed input that no report can describe.
void check_structure(const GeneratorModel& gen) {
  std::visit(
      overloaded{
          [](const ConstantGenerator&) {},
          [](const SinePhaseGenerator& g) {
            if (!std::isfinite(g.amplitude) || g.amplitude < 0.0)
              throw ModelError("sine_phase: amplitude must be finite and >= 0");
          },
          [](const FiniteMixtureGenerator& g) {
            if (g.grid.size() < 2) throw ModelError("finite_mixture: grid needs >= 2 nodes");
            if (g.grid.front() != 0.0 || g.grid.back() != 1.0)
              throw ModelError("finite_mixture: grid must span [0,1]");
            if (!std::is_sorted(g.grid.begin(), g.grid.end()) ||
                std::adjacent_find(g.grid.begin(), g.grid.end()) != g.grid.end())
              throw ModelError("finite_mixture: grid must be strictly increasing");
            if (g.functions.empty()) throw ModelError("finite_mixture: no functions");
            for (const auto& f : g.functions) {
              if (f.size() != g.grid.size())
                throw ModelError("finite_mixture: function table size differs from grid");
              for (double v : f)
                if (!std::isfinite(v)) throw ModelError("finite_mixture: non-finite value");
            }
          },
          [](const ExplicitInfLawGenerator& g) {
            if (g.atoms.empty()) throw ModelError("explicit_inf_law: no atoms");
            if (!(g.bound >= 1.0)) throw ModelError("explicit_inf_law: bound m must be >= 1");
            static_cast<void>(InfLaw(g.atoms, g.bound));
          },
      },
      gen);
}

// Violations of the generator definition (0 <= Z <= m, E Z_t = 1) that
// validate_generator reports and inf_law rejects.
std::vector<std::string> invariant_violations(const GeneratorModel& gen) {
  std::vector<std::string> out;
  std::visit(overloaded{
                 [](const ConstantGenerator&) {},
                 [&](const SinePhaseGenerator& g) {
                   if (g.amplitude > 1.0)
                     out.push_back("sine_phase: amplitude > 1 makes Z negative");
                 },
                 [&](const FiniteMixtureGenerator& g) {
                   const double k = static_cast<double>(g.functions.size());
                   for (std::size_t i = 0; i < g.grid.size(); ++i) {
                     double sum = 0.0;
                     for (const auto& f : g.functions) {
                       if (f[i] < 0.0) {
                         out.push_back("finite_mixture: negative value at node " +
                                       std::to_string(i));
                       }
                       sum += f[i];
                     }
                     if (std::abs(sum / k - 1.0) > kMixtureMeanTol)
                       out.push_back("finite_mixture: mean differs from 1 at node " +
                                     std::to_string(i));
                   }
                 },
                 [&](const ExplicitInfLawGenerator& g) {
                   // inf Z <= Z_t and E Z_t = 1.
                   if (InfLaw(g.atoms, g.bound).a() > 1.0 + 1e-12)
                     out.push_back("explicit_inf_law: E(inf Z) exceeds 1");
                 },
             },
             gen);
  return out;
}

}  // namespace

InfLaw::InfLaw(std::vector<Atom> atoms, double bound) : bound_(bound) {
  if (atoms.empty()) throw ModelError("inf law needs at least one atom");
  if (atoms.size() > kMaxAtoms) throw ModelError("inf law exceeds the atom cap");
  if (!(bound > 0.0) || !std::isfinite(bound)) throw ModelError("inf law bound must be > 0");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0)) throw ModelError("inf law weights must be > 0");
    if (!(a.value >= 0.0 && a.value <= bound))
      throw ModelError("inf law atoms must lie in [0, m]");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTol)
    throw ModelError("inf law weights must sum to 1 (got " + std::to_string(total) + ")");

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().value == a.value)
      atoms_.back().weight += a.weight;
    else
      atoms_.push_back(a);
  }
  cumulative_.reserve(atoms_.size());
  double acc = 0.0;
  for (const auto& a : atoms_) {
    acc += a.weight;
    cumulative_.push_back(acc);
    a_ += a.weight * a.value;
  }
}

InfLaw InfLaw::empirical(std::vector<double> values, double bound) {
  if (values.empty()) throw ModelError("empirical inf law needs observations");
  std::sort(values.begin(), values.end());
  const double w = 1.0 / static_cast<double>(values.size());
  std::vector<Atom> atoms;
  atoms.reserve(values.size());
  for (double v : values) atoms.push_back({v, w});
  // Equal weights of 1/N accumulate rounding; renormalize the last atom.
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) total += atoms[i].weight;
  atoms.back().weight = 1.0 - total;
  return InfLaw(std::move(atoms), bound);
}

double InfLaw::b(double delta) const {
  double sum = 0.0;
  for (const auto& a : atoms_) sum += a.weight * std::pow(a.value, 1.0 + delta);
  return sum;
}

std::size_t InfLaw::sample_index(RandomStream& rng) const {
  if (atoms_.size() == 1) return 0;
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                               atoms_.size() - 1);
}

std::string generator_name(const GeneratorModel& gen) {
  return std::visit(overloaded{
                        [](const ConstantGenerator&) { return std::string("constant"); },
                        [](const SinePhaseGenerator&) { return std::string("sine_phase"); },
                        [](const FiniteMixtureGenerator&) {
                          return std::string("finite_mixture");
                        },
                        [](const ExplicitInfLawGenerator&) {
                          return std::string("explicit_inf_law");
                        },
                    },
                    gen);
}

double generator_bound(const GeneratorModel& gen) {
  return std::visit(
      overloaded{
          [](const ConstantGenerator&) { return 1.0; },
          [](const SinePhaseGenerator& g) { return 1.0 + g.amplitude; },
          [](const FiniteMixtureGenerator& g) {
            double m = 1.0;
            for (const auto& f : g.functions)
              for (double v : f) m = std::max(m, v);
            return m;
          },
          [](const ExplicitInfLawGenerator& g) { return g.bound; },
      },
      gen);
}

void check_generator(const GeneratorModel& gen) {
  check_structure(gen);
  const auto violations = invariant_violations(gen);
  if (!violations.empty()) throw ModelError(violations.front());
}

InfLaw inf_law(const GeneratorModel& gen) {
  check_generator(gen);
  const double m = generator_bound(gen);
  return std::visit(
      overloaded{
          [m](const ConstantGenerator&) { return InfLaw({{1.0, 1.0}}, m); },
          [m](const SinePhaseGenerator& g) {
            // The phase only shifts the sine; every path attains 1 - a.
            return InfLaw({{1.0 - g.amplitude, 1.0}}, m);
          },
          [m](const FiniteMixtureGenerator& g) {
            // Piecewise-linear paths attain their infimum at a node.
            const double w = 1.0 / static_cast<double>(g.functions.size());
            std::vector<InfLaw::Atom> atoms;
            for (const auto& f : g.functions)
              atoms.push_back({*std::min_element(f.begin(), f.end()), w});
            double total = 0.0;
            for (std::size_t i = 0; i + 1 < atoms.size(); ++i) total += atoms[i].weight;
            atoms.back().weight = 1.0 - total;
            return InfLaw(std::move(atoms), m);
          },
          [m](const ExplicitInfLawGenerator& g) { return InfLaw(g.atoms, m); },
      },
      gen);
}

std::vector<double> uniform_grid(std::size_t grid_size) {
  if (grid_size < 2) throw ModelError("grid_size must be >= 2");
  std::vector<double> grid(grid_size);
  const double step = 1.0 / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) grid[i] = static_cast<double>(i) * step;
  grid.back() = 1.0;
  return grid;
}

std::vector<double> sine_phase_path(double amplitude, double phase,
                                    std::span<const double> grid) {
  std::vector<double> path;
  path.reserve(grid.size());
  for (double t : grid)
    path.push_back(1.0 + amplitude * std::sin(2.0 * std::numbers::pi * (t + phase)));
  return path;
}

std::vector<double> sample_path(const GeneratorModel& gen, std::span<const double> grid,
                                RandomStream& rng) {
  for (double t : grid)
    if (!(t >= 0.0 && t <= 1.0)) throw ModelError("path grid must lie in [0,1]");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw ModelError("path grid must be sorted");
  return std::visit(
      overloaded{
          [&](const ConstantGenerator&) { return std::vector<double>(grid.size(), 1.0); },
          [&](const SinePhaseGenerator& g) {
            return sine_phase_path(g.amplitude, rng.uniform(), grid);
          },
          [&](const FiniteMixtureGenerator& g) {
            const auto& f = g.functions[rng.below(g.functions.size())];
            std::vector<double> path;
            path.reserve(grid.size());
            for (double t : grid) path.push_back(interpolate(g.grid, f, t));
            return path;
          },
          [](const ExplicitInfLawGenerator&) -> std::vector<double> {
            throw ModelError("explicit_inf_law has no path representation");
          },
      },
      gen);
}

InfLaw empirical_inf_law(const GeneratorModel& gen, std::size_t grid_size,
                         std::size_t mc_samples, Seed seed) {
  check_generator(gen);
  if (std::holds_alternative<ExplicitInfLawGenerator>(gen)) return inf_law(gen);
  if (mc_samples < 1) throw ModelError("mc_samples must be >= 1");
  if (mc_samples > InfLaw::kMaxAtoms) throw ModelError("mc_samples exceeds the atom cap");
  const auto grid = uniform_grid(grid_size);
  std::vector<double> minima;
  minima.reserve(mc_samples);
  for (std::size_t i = 0; i < mc_samples; ++i) {
    RandomStream rng(seed, i);
    const auto path = sample_path(gen, grid, rng);
    minima.push_back(*std::min_element(path.begin(), path.end()));
  }
  return InfLaw::empirical(std::move(minima), generator_bound(gen));
}

ValidationReport validate_generator(const GeneratorModel& gen, std::size_t grid_size,
                                    std::size_t mc_samples, Seed seed) {
  check_structure(gen);
  ValidationReport report;
  report.generator = generator_name(gen);
  report.bound = generator_bound(gen);
  report.diagnostics = invariant_violations(gen);

  const bool explicit_law = std::holds_alternative<ExplicitInfLawGenerator>(gen);
  if (!explicit_law) {
    report.grid = uniform_grid(grid_size);
    const std::size_t nodes = report.grid.size();
    report.mean.assign(nodes, 0.0);
    report.standard_error.assign(nodes, 0.0);

    if (const auto* sine = std::get_if<SinePhaseGenerator>(&gen)) {
      if (mc_samples < 2) throw ModelError("validate_generator: mc_samples must be >= 2");
      report.analytic_means = false;
      std::vector<double> sum_sq(nodes, 0.0);
      for (std::size_t i = 0; i < mc_samples; ++i) {
        RandomStream rng(seed, i);
        const auto path = sine_phase_path(sine->amplitude, rng.uniform(), report.grid);
        for (std::size_t k = 0; k < nodes; ++k) {
          report.mean[k] += path[k];
          sum_sq[k] += path[k] * path[k];
          if (path[k] < 0.0 || path[k] > report.bound) ++report.bound_violations;
        }
      }
      const double r = static_cast<double>(mc_samples);
      for (std::size_t k = 0; k < nodes; ++k) {
        const double mean = report.mean[k] / r;
        const double var = std::max(0.0, (sum_sq[k] - r * mean * mean) / (r - 1.0));
        report.mean[k] = mean;
        report.standard_error[k] = std::sqrt(var / r);
      }
    } else {
      // Constant and finite mixtures have exact node means.
      if (const auto* mix = std::get_if<FiniteMixtureGenerator>(&gen)) {
        const double k = static_cast<double>(mix->functions.size());
        for (const auto& f : mix->functions) {
          for (std::size_t n = 0; n < nodes; ++n) {
            const double v = interpolate(mix->grid, f, report.grid[n]);
            report.mean[n] += v / k;
            if (v < 0.0 || v > report.bound) ++report.bound_violations;
          }
        }
      } else {
        std::fill(report.mean.begin(), report.mean.end(), 1.0);
      }
    }

    for (std::size_t k = 0; k < nodes; ++k) {
      const double dev = std::abs(report.mean[k] - 1.0);
      report.max_mean_deviation = std::max(report.max_mean_deviation, dev);
      if (!report.analytic_means && report.standard_error[k] > 0.0)
        report.max_deviation_se = std::max(report.max_deviation_se, dev / report.standard_error[k]);
    }
    report.mean_ok = report.analytic_means ? report.max_mean_deviation <= kMixtureMeanTol
                                           : report.max_deviation_se <= 3.0;
    if (!report.mean_ok) report.diagnostics.push_back("E(Z_t) differs from 1");
    if (report.bound_violations > 0)
      report.diagnostics.push_back("path values outside [0, m]");
  } else {
    report.mean_ok = true;
  }

  try {
    if (explicit_law) {
      const auto& g = std::get<ExplicitInfLawGenerator>(gen);
      report.a = InfLaw(g.atoms, g.bound).a();
    } else {
      // Exact inf law, computed without the invariant gate so a report can
      // still be produced for a broken model.
      report.a = std::visit(
          overloaded{
              [](const ConstantGenerator&) { return 1.0; },
              [](const SinePhaseGenerator& g) { return 1.0 - g.amplitude; },
              [](const FiniteMixtureGenerator& g) {
                double sum = 0.0;
                for (const auto& f : g.functions) sum += *std::min_element(f.begin(), f.end());
                return sum / static_cast<double>(g.functions.size());
              },
              [](const ExplicitInfLawGenerator&) { return 0.0; },
          },
          gen);
    }
  } catch (const ModelError& e) {
    report.diagnostics.push_back(e.what());
    report.a = 0.0;
  }
  report.a_positive = report.a > 0.0;
  if (!report.a_positive) report.diagnostics.push_back("A = E(inf Z) is not positive");
  report.passed = report.diagnostics.empty();
  return report;
}

}  // namespace gpptest
