#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gpptest/errors.hpp"
#include "gpptest/generators.hpp"

using namespace gpptest;

TEST(InfLaw, Constant) {
  const auto law = inf_law(ConstantGenerator{});
  ASSERT_EQ(law.size(), 1u);
  EXPECT_EQ(law.atoms()[0].value, 1.0);
  EXPECT_EQ(law.a(), 1.0);
  for (double d : {0.0, 0.5, 1.0}) EXPECT_EQ(law.b(d), 1.0);
}

TEST(InfLaw, SinePhase) {
  const auto law = inf_law(SinePhaseGenerator{0.5});
  ASSERT_EQ(law.size(), 1u);
  EXPECT_EQ(law.a(), 0.5);
  EXPECT_DOUBLE_EQ(law.b(1.0), 0.25);
}

TEST(InfLaw, ExplicitTwoAtoms) {
  const auto law = inf_law(ExplicitInfLawGenerator{{{0.5, 0.5}, {1.0, 0.5}}, 1.0});
  EXPECT_DOUBLE_EQ(law.a(), 0.75);
  EXPECT_DOUBLE_EQ(law.b(1.0), 0.625);
}

TEST(InfLaw, MergesDuplicatesAndSorts) {
  const InfLaw law({{1.0, 0.25}, {0.5, 0.5}, {1.0, 0.25}}, 1.0);
  ASSERT_EQ(law.size(), 2u);
  EXPECT_EQ(law.atoms()[0].value, 0.5);
  EXPECT_EQ(law.atoms()[1].weight, 0.5);
}

TEST(InfLaw, RejectsMalformedWeights) {
  EXPECT_THROW(InfLaw({{0.5, 0.4}, {1.0, 0.5}}, 1.0), ModelError);
  EXPECT_THROW(InfLaw({{0.5, -0.1}, {1.0, 1.1}}, 1.0), ModelError);
  EXPECT_THROW(InfLaw({{1.5, 1.0}}, 1.0), ModelError);
  EXPECT_THROW(InfLaw({}, 1.0), ModelError);
  EXPECT_THROW(inf_law(ExplicitInfLawGenerator{{{0.5, 0.4}, {1.0, 0.5}}, 1.0}), ModelError);
}

TEST(InfLaw, BAtZeroIsAAndBelowAOnUnitSupport) {
  const InfLaw law({{0.2, 0.1}, {0.6, 0.3}, {0.9, 0.6}}, 1.0);
  EXPECT_EQ(law.b(0.0), law.a());
  for (double d : {0.1, 0.5, 1.0}) {
    EXPECT_LE(law.b(d), law.a());
    EXPECT_GT(law.b(d), 0.0);
  }
}

TEST(InfLaw, DegenerateLawConsumesNoRandomness) {
  const auto law = inf_law(ConstantGenerator{});
  RandomStream a(1, 0);
  RandomStream b(1, 0);
  law.sample(a);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(InfLaw, SamplingFrequenciesMatchWeights) {
  const InfLaw law({{0.2, 0.1}, {0.6, 0.3}, {0.9, 0.6}}, 1.0);
  RandomStream rng(5, 0);
  std::vector<int> counts(3, 0);
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) ++counts[law.sample_index(rng)];
  const double w[] = {0.1, 0.3, 0.6};
  for (int k = 0; k < 3; ++k) {
    const double se = std::sqrt(w[k] * (1 - w[k]) / kDraws);
    EXPECT_NEAR(counts[k] / double(kDraws), w[k], 4 * se);
  }
}

TEST(SamplePath, ConstantAndFlatSine) {
  const auto grid = uniform_grid(33);
  RandomStream rng(1, 0);
  for (double v : sample_path(ConstantGenerator{}, grid, rng)) EXPECT_EQ(v, 1.0);
  for (double v : sample_path(SinePhaseGenerator{0.0}, grid, rng)) EXPECT_EQ(v, 1.0);
}

TEST(SamplePath, SineWithFixedPhase) {
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75};
  const auto path = sine_phase_path(0.5, 0.0, grid);
  const double expected[] = {1.0, 1.5, 1.0, 0.5};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(path[i], expected[i], 1e-15);
}

TEST(SamplePath, SineMinimumApproachesInfOnFineGrid) {
  const auto grid = uniform_grid(4096);
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomStream rng(8, s);
    const auto path = sample_path(SinePhaseGenerator{0.5}, grid, rng);
    EXPECT_NEAR(*std::min_element(path.begin(), path.end()), 0.5, 1e-4);
  }
}

TEST(SamplePath, ExplicitLawHasNoPaths) {
  RandomStream rng(1, 0);
  EXPECT_THROW(sample_path(ExplicitInfLawGenerator{{{1.0, 1.0}}, 1.0}, uniform_grid(4), rng),
               ModelError);
}

// The grid minimum of a sine path misses the true infimum by at most
// a (1 - cos(pi h)) for node spacing h; the tolerance adds that to 4 SE.
TEST(EmpiricalInfLaw, MeanOfGridMinimaMatchesA) {
  const std::size_t grid = 512;
  const std::size_t paths = 100000;
  const std::vector<GeneratorModel> gens{
      ConstantGenerator{}, SinePhaseGenerator{0.5},
      FiniteMixtureGenerator{{0.0, 0.5, 1.0}, {{0.5, 1.5, 0.5}, {1.5, 0.5, 1.5}, {1.0, 1.0, 1.0}}}};
  for (const auto& gen : gens) {
    const auto exact = inf_law(gen);
    const auto mc = empirical_inf_law(gen, grid, paths, 77);
    double var = 0.0;
    for (const auto& a : mc.atoms()) var += a.weight * (a.value - mc.a()) * (a.value - mc.a());
    const double se = std::sqrt(var / paths);
    double discretization = 0.0;
    if (const auto* s = std::get_if<SinePhaseGenerator>(&gen))
      discretization = s->amplitude * (1.0 - std::cos(M_PI / (grid - 1)));
    EXPECT_NEAR(mc.a(), exact.a(), 4 * se + discretization + 1e-12) << generator_name(gen);
  }
}

TEST(ValidateGenerator, ConstantPasses) {
  const auto r = validate_generator(ConstantGenerator{}, 64, 100, 1);
  EXPECT_EQ(r.max_mean_deviation, 0.0);
  EXPECT_EQ(r.bound_violations, 0u);
  EXPECT_TRUE(r.passed);
}

TEST(ValidateGenerator, FullAmplitudeSineFlagsZeroA) {
  const auto r = validate_generator(SinePhaseGenerator{1.0}, 64, 100000, 3);
  EXPECT_FALSE(r.analytic_means);
  EXPECT_LE(r.max_deviation_se, 3.0);
  EXPECT_EQ(r.a, 0.0);
  EXPECT_FALSE(r.a_positive);
  EXPECT_FALSE(r.passed);
}

TEST(ValidateGenerator, ConstantMixtureHasExactMeans) {
  const FiniteMixtureGenerator mix{{0.0, 1.0}, {{1.5, 1.5}, {0.5, 0.5}}};
  const auto r = validate_generator(mix, 17, 100, 1);
  EXPECT_EQ(r.max_mean_deviation, 0.0);
  EXPECT_EQ(r.bound_violations, 0u);
  EXPECT_DOUBLE_EQ(r.a, 1.0);
  EXPECT_TRUE(r.passed);
}

TEST(ValidateGenerator, MixtureWithWrongMeanFails) {
  const FiniteMixtureGenerator mix{{0.0, 1.0}, {{1.5, 1.5}, {0.6, 0.6}}};
  const auto r = validate_generator(mix, 17, 100, 1);
  EXPECT_FALSE(r.mean_ok);
  EXPECT_FALSE(r.passed);
  EXPECT_THROW(inf_law(mix), ModelError);
}

TEST(CheckGenerator, StructuralErrors) {
  EXPECT_THROW(check_generator(SinePhaseGenerator{-0.1}), ModelError);
  EXPECT_THROW(check_generator(SinePhaseGenerator{1.5}), ModelError);
  EXPECT_THROW(check_generator(FiniteMixtureGenerator{{0.0, 0.5}, {{1.0, 1.0}}}), ModelError);
  EXPECT_THROW(check_generator(ExplicitInfLawGenerator{{{1.0, 1.0}}, 0.5}), ModelError);
  EXPECT_NO_THROW(check_generator(SinePhaseGenerator{1.0}));
}

TEST(GeneratorBound, PerKind) {
  EXPECT_EQ(generator_bound(ConstantGenerator{}), 1.0);
  EXPECT_EQ(generator_bound(SinePhaseGenerator{0.5}), 1.5);
  EXPECT_EQ(generator_bound(FiniteMixtureGenerator{{0.0, 1.0}, {{1.5, 1.5}, {0.5, 0.5}}}), 1.5);
}
