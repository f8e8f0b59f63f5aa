// Runs each acceptance criterion at its stated scale and tolerance, prints one
// PASS/FAIL line per criterion and exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gpptest/asymptotics.hpp"
#include "gpptest/cli.hpp"
#include "gpptest/exceedance.hpp"
#include "gpptest/mc_harness.hpp"
#include "gpptest/teststats.hpp"
#include "oracles.hpp"

using namespace gpptest;
namespace fs = std::filesystem;

namespace {

constexpr Seed kSeed = 20240601;

void note(const std::string& line) { std::cout << "    " << line << "\n"; }

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string describe(const MCSummary& s) {
  return s.label + " = " + fmt(s.estimate) + " [" + fmt(s.ci_low) + ", " + fmt(s.ci_high) +
         "] R_eff " + std::to_string(s.r_effective);
}

bool check(bool ok, const std::string& what) {
  note(std::string(ok ? "ok   " : "MISS ") + what);
  return ok;
}

bool criterion_are_curve() {
  bool ok = check(std::abs(are_delta(1.0) - 3.0 / (4.0 * M_PI)) <= 1e-6,
                  "are(1) = " + fmt(are_delta(1.0), 9) + " vs 3/(4 pi) = " +
                      fmt(3.0 / (4.0 * M_PI), 9));
  ok &= check(are_delta(0.0) == 0.0, "are(0) = " + fmt(are_delta(0.0), 1));
  std::vector<double> curve;
  for (int i = 0; i < 100; ++i) curve.push_back(are_delta(i / 99.0));
  bool increasing = true;
  bool finite = true;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    finite = finite && std::isfinite(curve[i]) && curve[i] >= 0.0 && curve[i] < 1.0;
    if (i > 0) increasing = increasing && curve[i] > curve[i - 1];
  }
  ok &= check(finite, "100-point curve finite and inside [0, 1)");
  ok &= check(increasing, "strictly increasing on the 100-point grid");
  bool coarse = true;
  for (int i = 1; i <= 10; ++i) coarse = coarse && are_delta(i / 10.0) > are_delta((i - 1) / 10.0);
  ok &= check(coarse, "strictly increasing on the coarse 11-point grid");
  return ok;
}

bool criterion_null_normality() {
  ExperimentConfig cfg;
  cfg.n = 2000;
  cfg.threshold.c = -0.05;
  cfg.replications = 10000;
  cfg.seed = kSeed;
  const auto ks = ks_uniformity_check(cfg, KsTarget::kOmnibusStatistic);
  return check(ks.distance < 0.0163, "KS D = " + fmt(ks.distance) + " < 0.0163 over " +
                                         std::to_string(ks.summary.r_effective) + " replications");
}

bool criterion_size() {
  bool ok = true;
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> plans{
      {ModelKind::kDelta, {"optimal_delta_upper", "optimal_delta_lower", "omnibus_upper",
                           "omnibus_lower"}},
      {ModelKind::kExpFam, {"optimal_expfam_upper", "optimal_expfam_lower", "omnibus_upper",
                            "omnibus_lower"}}};
  for (const auto& [kind, names] : plans) {
    ExperimentConfig cfg;
    cfg.family.kind = kind;
    cfg.n = 10000;
    cfg.replications = 10000;
    cfg.seed = kSeed;
    std::vector<TestSpec> tests;
    for (const auto& name : names) tests.push_back(parse_test_name(name));
    note(model_name(kind) + " model, c = " + fmt(resolve_threshold(cfg, cfg.n), 5));
    for (const auto& s : estimate_rejection_rates(cfg, 0.0, tests))
      ok &= check(s.ci_low <= 0.05 && 0.05 <= s.ci_high, describe(s) + " covers 0.05");
  }
  return ok;
}

bool criterion_delta_power() {
  ExperimentConfig cfg;
  cfg.n = 100000;
  cfg.replications = 10000;
  cfg.seed = kSeed;
  const auto rows = estimate_rejection_rates(
      cfg, 2.0, {parse_test_name("optimal_delta_upper"), parse_test_name("omnibus_upper")});
  const double opt_pred =
      1.0 - oracle::normal_cdf(oracle::normal_quantile(0.95) - 2.0 / std::sqrt(3.0));
  const double omni_pred =
      1.0 - oracle::normal_cdf(oracle::normal_quantile(0.95) - 2.0 * oracle::psi_at_one());
  bool ok = check(std::abs(rows[0].estimate - opt_pred) <= 0.05,
                  describe(rows[0]) + " within 0.05 of " + fmt(opt_pred));
  ok &= check(std::abs(rows[1].estimate - omni_pred) <= 0.05,
              describe(rows[1]) + " within 0.05 of " + fmt(omni_pred));
  ok &= check(rows[0].estimate > rows[1].estimate, "optimal exceeds omnibus");
  return ok;
}

bool criterion_expfam_power() {
  ExperimentConfig cfg;
  cfg.family.kind = ModelKind::kExpFam;
  cfg.n = 100000;
  cfg.replications = 10000;
  cfg.seed = kSeed;
  const auto rows = estimate_rejection_rates(
      cfg, 2.0, {parse_test_name("optimal_expfam_upper"), parse_test_name("omnibus_upper")});
  const double pred = 1.0 - oracle::normal_cdf(oracle::normal_quantile(0.95) - 2.0);
  bool ok = check(std::abs(rows[0].estimate - pred) <= 0.05,
                  describe(rows[0]) + " within 0.05 of " + fmt(pred));
  ok &= check(std::abs(rows[1].estimate - 0.05) <= 0.02,
              describe(rows[1]) + " within 0.02 of 0.05");
  return ok;
}

bool lan_criterion(ModelKind kind, double mean, double variance) {
  ExperimentConfig cfg;
  cfg.family.kind = kind;
  cfg.xi = {1.0};
  cfg.n = 100000;
  cfg.replications = 10000;
  cfg.seed = kSeed;
  const auto lan = lan_empirical_check(cfg);
  const double m = lan.mean.estimate;
  const double v = lan.variance.estimate;
  bool ok = check(std::abs(m - mean) <= std::max(0.15 * std::abs(mean), 0.03),
                  "mean " + fmt(m) + " vs " + fmt(mean) + " (15% or 0.03)");
  ok &= check(std::abs(v - variance) <= 0.15 * variance,
              "variance " + fmt(v) + " vs " + fmt(variance) + " (15%)");
  return ok;
}

bool criterion_samplers() {
  ExperimentConfig cfg;
  cfg.generator = SinePhaseGenerator{0.5};
  cfg.grid_size = 2048;
  cfg.n = 50;
  cfg.threshold.c = -0.1;
  cfg.replications = 10000;
  cfg.seed = kSeed;
  const auto r = compare_samplers(cfg);
  return check(r.distance < r.critical_value,
               "two-sample D = " + fmt(r.distance) + " < " + fmt(r.critical_value) +
                   " (1%), p = " + fmt(r.p_value, 3));
}

ExceedanceSample sample_of(std::int64_t n, double c, std::vector<double> ys) {
  ExceedanceSample s;
  s.n = n;
  s.c = c;
  s.ys = std::move(ys);
  return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// value() is evaluated twice; both results must agree bit for bit and lie
// within tol of expected.
bool golden(const std::string& what, const std::function<double()>& value, double expected,
            double tol) {
  const double a = value();
  const double b = value();
  return check(same_bits(a, b) && std::abs(a - expected) <= tol,
               what + " = " + fmt(a, 10) + " (expected " + fmt(expected, 10) + ")");
}

bool criterion_golden() {
  const InfLaw unit({{1.0, 1.0}}, 1.0);
  const DeltaModel family{1.0, 0.1, 0.5};
  bool ok = golden("loglik_ratio one exceedance",
                   [&] { return loglik_ratio(sample_of(1, -0.2, {0.5}), 0.1, family, unit); },
                   0.0099503, 1e-7);
  ok &= check(std::abs(loglik_ratio(sample_of(1, -0.2, {0.5}), 0.1, family, unit) -
                       std::log(1.01)) <= 1e-10,
              "loglik_ratio matches log(1.01) to 1e-10");
  ok &= golden("loglik_ratio no exceedance",
               [&] { return loglik_ratio(sample_of(1, -0.2, {}), 0.1, family, unit); },
               std::log(0.798 / 0.8), 1e-10);
  ok &= golden("P(uniform, c = -0.1)",
               [&] { return exceedance_probability(Uniform01{}, unit, -0.1); }, 0.1, 1e-15);
  ok &= golden("P(delta theta = 0.1, c = -0.2)",
               [&] { return exceedance_probability(family, unit, -0.2); }, 0.202, 1e-15);
  const auto flat = [](std::int64_t tau) {
    return sample_of(10000, -0.01, std::vector<double>(tau, 0.5));
  };
  ok &= golden("z_n1 tau = 120", [&] { return z_n1(flat(120), 1.0); }, 2.0, 1e-15);
  ok &= golden("z_n1 tau = 100", [&] { return z_n1(flat(100), 1.0); }, 0.0, 0.0);
  ok &= golden("z_n1 tau = 80", [&] { return z_n1(flat(80), 1.0); }, -2.0, 1e-15);
  ok &= golden("z_n2 {1}", [&] { return z_n2(sample_of(5, -0.1, {1.0}), 1.0); }, 1.0, 1e-15);
  ok &= golden("z_n2 {0.5, 0.5}", [&] { return z_n2(sample_of(5, -0.1, {0.5, 0.5}), 1.0); },
               0.0, 0.0);
  ok &= golden("z_n2 {0.25, 0.81}",
               [&] { return z_n2(sample_of(5, -0.1, {0.25, 0.81}), 0.5); },
               1.5 / std::sqrt(2.0) * (0.5 + 0.9 - 4.0 / 3.0), 1e-12);
  ok &= golden("T {0.5}", [&] { return omnibus_statistic(sample_of(5, -0.1, {0.5})).value; },
               0.0, 0.0);
  ok &= golden("T {0.975, 0.975}",
               [&] { return omnibus_statistic(sample_of(5, -0.1, {0.975, 0.975})).value; },
               2.0 * oracle::normal_quantile(0.975) / std::sqrt(2.0), 1e-9);
  ok &= golden("T {0.25, 0.75}",
               [&] { return omnibus_statistic(sample_of(5, -0.1, {0.25, 0.75})).value; }, 0.0,
               0.0);
  return ok;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / "gpptest_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string config = (fs::path(GPPTEST_SOURCE_DIR) / "configs" / "delta_power.json");
  std::ostringstream sink;
  std::vector<std::string> csv;
  for (const char* threads : {"1", "8"}) {
    const auto out = (dir / (std::string("power_t") + threads + ".csv")).string();
    const int code = run_cli({"power", "--config", config, "--out", out, "--threads", threads,
                              "--replications", "2000", "--n", "20000"},
                             sink, sink);
    note("power --threads " + std::string(threads) + " exit " + std::to_string(code));
    csv.push_back(slurp(out));
  }
  fs::remove_all(dir);
  return check(!csv[0].empty() && csv[0] == csv[1],
               "CSV byte-identical (" + std::to_string(csv[0].size()) + " bytes)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<bool()>>> criteria{
      {"1 ARE curve", criterion_are_curve},
      {"2 exact null normality of T", criterion_null_normality},
      {"3 size control", criterion_size},
      {"4 delta-model power", criterion_delta_power},
      {"5 exponential-family power and blindness", criterion_expfam_power},
      {"6 empirical LAN, delta model",
       [] { return lan_criterion(ModelKind::kDelta, -1.0 / 6.0, 1.0 / 3.0); }},
      {"7 empirical LAN, exponential family",
       [] { return lan_criterion(ModelKind::kExpFam, -0.5, 1.0); }},
      {"8 reduced vs functional sampler", criterion_samplers},
      {"9 golden values", criterion_golden},
      {"10 determinism across threads", criterion_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    std::cout << "criterion " << name << "\n";
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = run();
    } catch (const std::exception& e) {
      note(std::string("error: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << name << " (" << fmt(secs, 1)
              << " s)\n"
              << std::flush;
    failures += !ok;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
