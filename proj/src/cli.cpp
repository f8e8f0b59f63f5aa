#include "gpptest/cli.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gpptest/asymptotics.hpp"
#include "gpptest/config.hpp"
#include "gpptest/errors.hpp"
#include "gpptest/mc_harness.hpp"
#include "gpptest/special_functions.hpp"

#ifndef GPPTEST_VERSION
#define GPPTEST_VERSION "0.0.0"
#endif

namespace gpptest {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string() + " for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("SHA-256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

std::string iso_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

json RunManifest::to_json() const {
  json outs = json::array();
  for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
  return {{"tool", "gpptest"},  {"version", tool_version}, {"command", command},
          {"config", config},   {"seed", seed},            {"started", started},
          {"finished", finished}, {"outputs", outs},       {"results", results}};
}

fs::path manifest_path(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

namespace {

class OutputFile {
 public:
  explicit OutputFile(const fs::path& path) : path_(path), stream_(path, std::ios::binary) {
    if (!stream_) throw IoError("cannot open " + path.string() + " for writing");
  }
  std::ostream& stream() { return stream_; }
  void close() {
    stream_.close();
    if (!stream_) throw IoError("error while writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream stream_;
};

void write_text(const fs::path& path, const std::string& text) {
  OutputFile f(path);
  f.stream() << text;
  f.close();
}

struct Overrides {
  std::string config;
  std::string out;
  unsigned long long seed = 0;
  unsigned threads = 1;
  long long replications = 0;
  long long n = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* replications_opt = nullptr;
  CLI::Option* n_opt = nullptr;
};

void add_common(CLI::App* cmd, Overrides& o, bool out_required) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required();
  auto* out = cmd->add_option("--out", o.out, "output file");
  if (out_required) out->required();
  o.seed_opt = cmd->add_option("--seed", o.seed, "override the master seed");
  o.threads_opt = cmd->add_option("--threads", o.threads, "cap on worker threads")
                      ->check(CLI::Range(1u, 1024u));
  o.replications_opt = cmd->add_option("--replications", o.replications, "override R");
  o.n_opt = cmd->add_option("--n", o.n, "override n");
}

ExperimentConfig load_with_overrides(const Overrides& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed_opt->count()) cfg.seed = o.seed;
  if (o.threads_opt->count()) cfg.threads = o.threads;
  if (o.replications_opt->count()) cfg.replications = o.replications;
  if (o.n_opt->count()) cfg.n = o.n;
  validate_config(cfg);
  return cfg;
}

RunManifest start_manifest(const std::string& command, json config, unsigned long long seed) {
  RunManifest m;
  m.tool_version = GPPTEST_VERSION;
  m.command = command;
  m.config = std::move(config);
  m.seed = seed;
  m.started = iso_timestamp_now();
  return m;
}

void finish_manifest(RunManifest& m, const fs::path& out) {
  m.outputs.push_back({out.string(), sha256_file(out)});
  m.finished = iso_timestamp_now();
  write_text(manifest_path(out), m.to_json().dump(2) + "\n");
}

json summary_json(const MCSummary& s) {
  return {{"label", s.label},
          {"xi", s.xi},
          {"estimate", s.estimate},
          {"ci_low", s.ci_low},
          {"ci_high", s.ci_high},
          {"replications", s.replications},
          {"R_effective", s.r_effective},
          {"prediction", s.prediction},
          {"within_tolerance", s.within_tolerance}};
}

int cmd_are_curve(double delta_min, double delta_max, int steps, const std::string& out_path,
                  std::ostream& out) {
  if (!(delta_min >= 0.0) || !(delta_min < delta_max) || !std::isfinite(delta_max))
    throw ConfigError("need 0 <= delta-min < delta-max", "delta-min");
  if (steps < 2) throw ConfigError("need at least 2 steps", "steps");
  auto manifest = start_manifest(
      "are-curve", {{"delta_min", delta_min}, {"delta_max", delta_max}, {"steps", steps}}, 0);
  OutputFile f(out_path);
  f.stream() << "delta,psi,are\n";
  for (int i = 0; i < steps; ++i) {
    const double delta = i == steps - 1
                             ? delta_max
                             : delta_min + (delta_max - delta_min) * i / (steps - 1.0);
    const double p = psi_cached(delta);
    f.stream() << format_real(delta) << ',' << format_real(p) << ','
               << format_real(are_delta(delta)) << '\n';
  }
  f.close();
  manifest.results = {{"rows", steps}};
  finish_manifest(manifest, out_path);
  out << "wrote " << steps << " rows to " << out_path << "\n";
  return kExitPass;
}

int cmd_power(const Overrides& o, bool size_only, std::ostream& out) {
  ExperimentConfig cfg = load_with_overrides(o);
  if (size_only) cfg.xi = {0.0};
  auto manifest = start_manifest(size_only ? "size" : "power", serialize_config(cfg), cfg.seed);
  const auto tests = effective_tests(cfg);
  const auto rows = power_curve(cfg, cfg.xi, tests);

  OutputFile f(o.out);
  f.stream() << "xi,test,estimate,ci_low,ci_high,prediction,R_effective\n";
  bool all_ok = true;
  json results = json::array();
  for (const auto& row : rows) {
    const auto& s = row.summary;
    f.stream() << format_real(s.xi) << ',' << s.label << ',' << format_real(s.estimate) << ','
               << format_real(s.ci_low) << ',' << format_real(s.ci_high) << ','
               << format_real(s.prediction) << ',' << s.r_effective << '\n';
    json entry = summary_json(s);
    if (!row.error.empty()) entry["error"] = row.error;
    results.push_back(entry);
    all_ok = all_ok && row.error.empty() && s.within_tolerance;
    out << std::left << std::setw(24) << s.label << " xi=" << std::setw(8) << s.xi
        << " estimate=" << std::setw(10) << s.estimate << " prediction=" << std::setw(10)
        << s.prediction << (row.error.empty() ? (s.within_tolerance ? " ok" : " MISS")
                                              : " ERROR: " + row.error)
        << "\n";
  }
  f.close();
  manifest.results = {{"rows", results}, {"all_within_tolerance", all_ok}};
  finish_manifest(manifest, o.out);
  return all_ok ? kExitPass : kExitScientificFailure;
}

int cmd_lan_check(const Overrides& o, std::ostream& out) {
  const ExperimentConfig cfg = load_with_overrides(o);
  auto manifest = start_manifest("lan-check", serialize_config(cfg), cfg.seed);
  const ResolvedCell cell = resolve_cell(cfg, cfg.xi.front());
  const LanSummary lan = lan_empirical_check(cfg);
  json report = {
      {"model", model_name(cfg.family.kind)},
      {"xi", cell.xi},
      {"n", cfg.n},
      {"c", cell.c},
      {"theta_n", cell.theta},
      {"replications", cfg.replications},
      {"empirical",
       {{"mean", lan.mean.estimate},
        {"variance", lan.variance.estimate},
        {"mean_ci", {lan.mean.ci_low, lan.mean.ci_high}},
        {"variance_ci", {lan.variance.ci_low, lan.variance.ci_high}}}},
      {"predicted", {{"mean", lan.predicted.mean_h0}, {"variance", lan.predicted.sigma2}}},
      {"tolerances", {{"rel_tol", cfg.lan.rel_tol}, {"mean_abs_tol", cfg.lan.mean_abs_tol}}},
      {"mean_within", lan.mean.within_tolerance},
      {"variance_within", lan.variance.within_tolerance},
      {"pass", lan.within_tolerance}};
  out << report.dump(2) << "\n";
  if (!o.out.empty()) {
    write_text(o.out, report.dump(2) + "\n");
    manifest.results = {{"pass", lan.within_tolerance}};
    finish_manifest(manifest, o.out);
  }
  return lan.within_tolerance ? kExitPass : kExitScientificFailure;
}

int cmd_simulate(const Overrides& o, std::ostream& out) {
  const ExperimentConfig cfg = load_with_overrides(o);
  auto manifest = start_manifest("simulate", serialize_config(cfg), cfg.seed);
  const ResolvedCell cell = resolve_cell(cfg, cfg.xi.front());
  OutputFile f(o.out);
  f.stream() << "replication,tau,y_index,y_value\n";
  std::int64_t total = 0;
  for (std::int64_t r = 0; r < cfg.replications; ++r) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(r));
    const auto sample = simulate(cfg.n, cell.c, cell.alternative, cell.law, rng);
    total += sample.tau();
    for (std::size_t k = 0; k < sample.ys.size(); ++k)
      f.stream() << r << ',' << sample.tau() << ',' << k << ',' << format_real(sample.ys[k])
                 << '\n';
  }
  f.close();
  manifest.results = {{"replications", cfg.replications}, {"n", cfg.n},
                      {"c", cell.c},                     {"xi", cell.xi},
                      {"theta", cell.theta},             {"total_exceedances", total}};
  finish_manifest(manifest, o.out);
  out << "wrote " << total << " exceedances from " << cfg.replications << " replications to "
      << o.out << "\n";
  return kExitPass;
}

int cmd_validate_generator(const Overrides& o, std::ostream& out) {
  const ExperimentConfig cfg = load_with_overrides(o);
  auto manifest = start_manifest("validate-generator", serialize_config(cfg), cfg.seed);
  const auto report =
      validate_generator(cfg.generator, cfg.grid_size, cfg.validation_samples, cfg.seed);
  out << "generator: " << report.generator << "\n"
      << "max |E Z_t - 1|: " << report.max_mean_deviation
      << (report.analytic_means ? " (analytic)" : " (Monte Carlo)") << "\n"
      << "bound violations: " << report.bound_violations << " (m = " << report.bound << ")\n"
      << "A = E(inf Z): " << report.a << "\n";
  for (const auto& d : report.diagnostics) out << "  - " << d << "\n";
  out << (report.passed ? "PASS" : "FAIL") << "\n";
  if (!o.out.empty()) {
    json doc = {{"generator", report.generator},
                {"analytic_means", report.analytic_means},
                {"max_mean_deviation", report.max_mean_deviation},
                {"max_deviation_se", report.max_deviation_se},
                {"bound_violations", report.bound_violations},
                {"bound", report.bound},
                {"a", report.a},
                {"a_positive", report.a_positive},
                {"mean_ok", report.mean_ok},
                {"passed", report.passed},
                {"diagnostics", report.diagnostics}};
    write_text(o.out, doc.dump(2) + "\n");
    manifest.results = {{"passed", report.passed}};
    finish_manifest(manifest, o.out);
  }
  return report.passed ? kExitPass : kExitScientificFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and testing of exceedances of generalized Pareto processes",
               "gpptest"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GPPTEST_VERSION);

  double delta_min = 0.0;
  double delta_max = 1.0;
  int steps = 100;
  std::string are_out;
  auto* are = app.add_subcommand("are-curve", "asymptotic relative efficiency of the omnibus test");
  are->add_option("--delta-min", delta_min);
  are->add_option("--delta-max", delta_max);
  are->add_option("--steps", steps);
  are->add_option("--out", are_out)->required();

  Overrides power_o, size_o, lan_o, sim_o, gen_o;
  add_common(app.add_subcommand("power", "rejection rates against asymptotic power"), power_o,
             true);
  add_common(app.add_subcommand("size", "rejection rates at xi = 0"), size_o, true);
  add_common(app.add_subcommand("lan-check", "empirical log-likelihood ratio moments"), lan_o,
             false);
  add_common(app.add_subcommand("simulate", "export simulated exceedances"), sim_o, true);
  add_common(app.add_subcommand("validate-generator", "check generator constraints"), gen_o,
             false);

  std::vector<std::string> argv_store{"gpptest"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (are->parsed()) return cmd_are_curve(delta_min, delta_max, steps, are_out, out);
    if (app.got_subcommand("power")) return cmd_power(power_o, false, out);
    if (app.got_subcommand("size")) return cmd_power(size_o, true, out);
    if (app.got_subcommand("lan-check")) return cmd_lan_check(lan_o, out);
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_o, out);
    if (app.got_subcommand("validate-generator")) return cmd_validate_generator(gen_o, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitScientificFailure;
  }
  return kExitConfigError;
}

}  // namespace gpptest
