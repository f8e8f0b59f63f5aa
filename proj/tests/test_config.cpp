#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gpptest/config.hpp"
#include "gpptest/errors.hpp"

using namespace gpptest;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ShippedConfigsRoundTrip) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(GPPTEST_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const auto cfg = load_config(entry.path());
    const auto once = serialize_config(cfg);
    const auto twice = serialize_config(parse_config(once));
    EXPECT_EQ(once, twice) << entry.path();
    const auto again = parse_config(once);
    EXPECT_EQ(again.n, cfg.n);
    EXPECT_EQ(again.seed, cfg.seed);
    EXPECT_EQ(again.xi, cfg.xi);
    EXPECT_EQ(again.tests, effective_tests(cfg));
    EXPECT_EQ(resolve_threshold(again, again.n), resolve_threshold(cfg, cfg.n));
  }
  EXPECT_GE(seen, 8);
}

TEST(Config, Defaults) {
  const auto cfg = parse_config_text("{}");
  EXPECT_EQ(cfg.family.kind, ModelKind::kDelta);
  EXPECT_EQ(cfg.family.delta, 1.0);
  EXPECT_EQ(cfg.clip, -1.0);
  EXPECT_EQ(cfg.alpha, 0.05);
  const auto out = serialize_config(cfg);
  EXPECT_DOUBLE_EQ(out["threshold"]["schedule"]["gamma"].get<double>(), 1.0 / 6.0);
  EXPECT_EQ(out["tests"].size(), 2u);
}

TEST(Config, ScalarAndListXi) {
  EXPECT_EQ(parse_config_text(R"({"xi": 2})").xi, std::vector<double>{2.0});
  EXPECT_EQ(parse_config_text(R"({"xi": [0, 1.5]})").xi, (std::vector<double>{0.0, 1.5}));
}

TEST(Config, FixedThresholdAndTheta) {
  const auto cfg = parse_config_text(R"({"threshold": {"c": -0.1}, "n": 100, "theta": 0.5})");
  EXPECT_EQ(cfg.threshold.c, -0.1);
  EXPECT_EQ(cfg.theta, 0.5);
  const auto out = serialize_config(cfg);
  EXPECT_EQ(out["threshold"]["c"].get<double>(), -0.1);
  EXPECT_EQ(out["theta"].get<double>(), 0.5);
  EXPECT_FALSE(serialize_config(parse_config_text("{}")).contains("theta"));
}

TEST(Config, ErrorsNameTheKeyPath) {
  EXPECT_NE(error_of(R"({"thershold": {"c": -0.1}})").find("thershold"), std::string::npos);
  EXPECT_NE(error_of(R"({"xi": "two"})").find("xi"), std::string::npos);
  EXPECT_NE(error_of(R"({"model": "gamma"})").find("model"), std::string::npos);
  EXPECT_NE(error_of(R"({"threshold": {"schedule": {"c0": 0.5, "gamma": 0.9}}})")
                .find("threshold.schedule.gamma"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"w": {"delta": 1, "u0": 0.5, "eps": 1}})").find("w.eps"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"tests": ["omnibus_sideways"]})").find("tests"), std::string::npos);
  EXPECT_NE(error_of(R"({"threads": 0})").find("threads"), std::string::npos);
  EXPECT_NE(error_of(R"({"w": {"delta": 1.5}})").find("w.delta"), std::string::npos);
}

TEST(Config, ExplicitLawWeightsMustSumToOne) {
  const std::string text = R"({"generator": {"kind": "explicit_inf_law",
                                "atoms": [[0.5, 0.4], [1.0, 0.5]], "m": 1.0}})";
  EXPECT_NE(error_of(text).find("generator.atoms"), std::string::npos);
}

TEST(Config, MalformedJsonAndMissingFile) {
  EXPECT_THROW(parse_config_text("{\"n\": "), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/dir/config.json"), IoError);
  const auto path = fs::temp_directory_path() / "gpptest_bad_config.json";
  std::ofstream(path) << "[1, 2";
  EXPECT_THROW(load_config(path), ConfigError);
  fs::remove(path);
}

TEST(Config, StatisticVariants) {
  const auto plateau = parse_config_text(
      R"({"model": "expfam", "w": {"T": {"kind": "plateau", "tau": 0.25}}})");
  EXPECT_EQ(plateau.family.t.kind(), StatisticT::Kind::kPlateau);
  EXPECT_EQ(plateau.family.t.tau(), 0.25);
  const auto table = parse_config_text(
      R"({"model": "expfam", "w": {"T": {"kind": "tabulated", "points": [[0, 1], [1, 0]]}}})");
  EXPECT_EQ(table.family.t.points().size(), 2u);
  const auto back = parse_config(serialize_config(table));
  EXPECT_EQ(back.family.t.points(), table.family.t.points());
}
