#include "gpptest/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "gpptest/errors.hpp"

namespace gpptest {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError("expected an object", path_.empty() ? "<root>" : path_);
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key)) throw ConfigError("missing required key", join(path_, key));
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (used_.insert(key), fallback);
  }
  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError("expected a number", join(path_, key));
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return used_.insert(key), fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError("expected an integer", join(path_, key));
    return v.get<std::int64_t>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return used_.insert(key), fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) throw ConfigError("expected a nonnegative integer", join(path_, key));
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return used_.insert(key), fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError("expected a string", join(path_, key));
    return v.get<std::string>();
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!used_.count(key)) throw ConfigError("unknown key", join(path_, key));
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError("expected a number or a list of numbers", path);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ConfigError("expected a number", path + "[" + std::to_string(i) + "]");
    out.push_back(v[i].get<double>());
  }
  return out;
}

StatisticT parse_statistic(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  const std::string kind = r.string("kind", "identity");
  StatisticT t = StatisticT::identity();
  try {
    if (kind == "identity") {
    } else if (kind == "plateau") {
      t = StatisticT::plateau(r.number("tau"));
    } else if (kind == "tabulated") {
      const json& pts = r.raw("points");
      if (!pts.is_array()) throw ConfigError("expected a list of [u, T] pairs", r.path("points"));
      std::vector<std::pair<double, double>> points;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto p = number_list(pts[i], r.path("points") + "[" + std::to_string(i) + "]");
        if (p.size() != 2 || !pts[i].is_array())
          throw ConfigError("expected a [u, T] pair",
                            r.path("points") + "[" + std::to_string(i) + "]");
        points.emplace_back(p[0], p[1]);
      }
      t = StatisticT::tabulated(std::move(points));
    } else {
      throw ConfigError("unknown statistic '" + kind + "'", r.path("kind"));
    }
  } catch (const ModelError& e) {
    throw ConfigError(e.what(), path);
  }
  r.finish();
  return t;
}

WFamily parse_family(const std::string& model, const json* w, const std::string& model_path) {
  WFamily f;
  if (model == "delta") {
    f.kind = ModelKind::kDelta;
    if (w) {
      ObjectReader r(*w, "w");
      f.delta = r.number("delta", f.delta);
      f.u0 = r.number("u0", f.u0);
      r.finish();
    }
  } else if (model == "expfam") {
    f.kind = ModelKind::kExpFam;
    if (w) {
      ObjectReader r(*w, "w");
      if (r.has("T")) f.t = parse_statistic(r.raw("T"), "w.T");
      r.finish();
    }
  } else {
    throw ConfigError("unknown model '" + model + "' (expected delta or expfam)", model_path);
  }
  return f;
}

GeneratorModel parse_generator(const json& v) {
  ObjectReader r(v, "generator");
  const std::string kind = r.string("kind", "constant");
  GeneratorModel gen;
  if (kind == "constant") {
    gen = ConstantGenerator{};
  } else if (kind == "sine_phase") {
    gen = SinePhaseGenerator{r.number("amplitude")};
  } else if (kind == "finite_mixture") {
    FiniteMixtureGenerator g;
    g.grid = number_list(r.raw("grid"), r.path("grid"));
    const json& fs = r.raw("functions");
    if (!fs.is_array()) throw ConfigError("expected a list of functions", r.path("functions"));
    for (std::size_t i = 0; i < fs.size(); ++i)
      g.functions.push_back(
          number_list(fs[i], r.path("functions") + "[" + std::to_string(i) + "]"));
    gen = std::move(g);
  } else if (kind == "explicit_inf_law") {
    ExplicitInfLawGenerator g;
    const json& atoms = r.raw("atoms");
    if (!atoms.is_array()) throw ConfigError("expected a list of [z, p] pairs", r.path("atoms"));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string p = r.path("atoms") + "[" + std::to_string(i) + "]";
      if (!atoms[i].is_array()) throw ConfigError("expected a [z, p] pair", p);
      const auto pair = number_list(atoms[i], p);
      if (pair.size() != 2) throw ConfigError("expected a [z, p] pair", p);
      g.atoms.push_back({pair[0], pair[1]});
    }
    g.bound = r.number("m", g.bound);
    gen = std::move(g);
  } else {
    throw ConfigError("unknown generator '" + kind + "'", r.path("kind"));
  }
  r.finish();
  try {
    check_generator(gen);
  } catch (const ModelError& e) {
    throw ConfigError(e.what(), kind == "explicit_inf_law" ? "generator.atoms" : "generator");
  }
  return gen;
}

json serialize_generator(const GeneratorModel& gen) {
  return std::visit(
      [](const auto& g) -> json {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ConstantGenerator>) {
          return {{"kind", "constant"}};
        } else if constexpr (std::is_same_v<G, SinePhaseGenerator>) {
          return {{"kind", "sine_phase"}, {"amplitude", g.amplitude}};
        } else if constexpr (std::is_same_v<G, FiniteMixtureGenerator>) {
          return {{"kind", "finite_mixture"}, {"grid", g.grid}, {"functions", g.functions}};
        } else {
          json atoms = json::array();
          for (const auto& a : g.atoms) atoms.push_back({a.value, a.weight});
          return {{"kind", "explicit_inf_law"}, {"atoms", atoms}, {"m", g.bound}};
        }
      },
      gen);
}

json serialize_statistic(const StatisticT& t) {
  switch (t.kind()) {
    case StatisticT::Kind::kIdentity:
      return {{"kind", "identity"}};
    case StatisticT::Kind::kPlateau:
      return {{"kind", "plateau"}, {"tau", t.tau()}};
    case StatisticT::Kind::kTabulated: {
      json pts = json::array();
      for (const auto& [u, v] : t.points()) pts.push_back({u, v});
      return {{"kind", "tabulated"}, {"points", pts}};
    }
  }
  return {};
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ObjectReader r(doc, "");
  ExperimentConfig cfg;
  const std::string model = r.string("model", "delta");
  cfg.family = parse_family(model, r.has("w") ? &r.raw("w") : nullptr, "model");
  if (r.has("generator")) cfg.generator = parse_generator(r.raw("generator"));
  if (r.has("xi")) cfg.xi = number_list(r.raw("xi"), "xi");
  cfg.alpha = r.number("alpha", cfg.alpha);
  cfg.n = r.integer("n", cfg.n);
  if (r.has("threshold")) {
    ObjectReader t(r.raw("threshold"), "threshold");
    if (t.has("c")) cfg.threshold.c = t.number("c");
    if (t.has("schedule")) {
      ObjectReader s(t.raw("schedule"), "threshold.schedule");
      ThresholdSchedule sched;
      sched.c0 = s.number("c0");
      sched.gamma = s.number("gamma");
      s.finish();
      cfg.threshold.schedule = sched;
    }
    t.finish();
  }
  cfg.clip = r.number("M", cfg.clip);
  cfg.grid_size = static_cast<std::size_t>(r.unsigned_integer("grid_size", cfg.grid_size));
  cfg.replications = r.integer("replications", cfg.replications);
  cfg.seed = r.unsigned_integer("seed", cfg.seed);
  if (r.has("tests")) {
    const json& tests = r.raw("tests");
    if (!tests.is_array()) throw ConfigError("expected a list of test names", "tests");
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const std::string p = "tests[" + std::to_string(i) + "]";
      if (!tests[i].is_string()) throw ConfigError("expected a test name", p);
      try {
        cfg.tests.push_back(parse_test_name(tests[i].get<std::string>()));
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), p);
      }
    }
  }
  cfg.power_tolerance = r.number("power_tolerance", cfg.power_tolerance);
  const auto threads = r.unsigned_integer("threads", cfg.threads);
  if (threads < 1 || threads > 1024) throw ConfigError("threads must lie in [1, 1024]", "threads");
  cfg.threads = static_cast<unsigned>(threads);
  if (r.has("lan")) {
    ObjectReader l(r.raw("lan"), "lan");
    cfg.lan.rel_tol = l.number("rel_tol", cfg.lan.rel_tol);
    cfg.lan.mean_abs_tol = l.number("mean_abs_tol", cfg.lan.mean_abs_tol);
    l.finish();
  }
  if (r.has("validation")) {
    ObjectReader v(r.raw("validation"), "validation");
    cfg.validation_samples =
        static_cast<std::size_t>(v.unsigned_integer("mc_samples", cfg.validation_samples));
    v.finish();
  }
  if (r.has("theta")) cfg.theta = r.number("theta");
  r.finish();
  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return parse_config_text(text.str());
}

json serialize_config(const ExperimentConfig& cfg) {
  json doc;
  doc["model"] = model_name(cfg.family.kind);
  if (cfg.family.kind == ModelKind::kDelta)
    doc["w"] = {{"delta", cfg.family.delta}, {"u0", cfg.family.u0}};
  else
    doc["w"] = {{"T", serialize_statistic(cfg.family.t)}};
  doc["generator"] = serialize_generator(cfg.generator);
  doc["xi"] = cfg.xi;
  doc["alpha"] = cfg.alpha;
  doc["n"] = cfg.n;
  if (cfg.threshold.c) {
    doc["threshold"] = {{"c", *cfg.threshold.c}};
  } else {
    const auto s = cfg.threshold.schedule.value_or(default_schedule(cfg.family));
    doc["threshold"] = {{"schedule", {{"c0", s.c0}, {"gamma", s.gamma}}}};
  }
  doc["M"] = cfg.clip;
  doc["grid_size"] = cfg.grid_size;
  doc["replications"] = cfg.replications;
  doc["seed"] = cfg.seed;
  json tests = json::array();
  for (const auto& t : effective_tests(cfg)) tests.push_back(test_name(t));
  doc["tests"] = tests;
  doc["power_tolerance"] = cfg.power_tolerance;
  doc["threads"] = cfg.threads;
  doc["lan"] = {{"rel_tol", cfg.lan.rel_tol}, {"mean_abs_tol", cfg.lan.mean_abs_tol}};
  doc["validation"] = {{"mc_samples", cfg.validation_samples}};
  if (cfg.theta) doc["theta"] = *cfg.theta;
  return doc;
}

}  // namespace gpptest
