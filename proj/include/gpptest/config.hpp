#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gpptest/mc_harness.hpp"

namespace gpptest {

/// JSON experiment configuration.
///
/// Keys: model ("delta" | "expfam"), w, generator, xi (number or list),
/// alpha, n, threshold ({"c": x} or {"schedule": {"c0", "gamma"}}), M,
/// grid_size, replications, seed, tests, power_tolerance, threads,
/// lan {rel_tol, mean_abs_tol}, validation {mc_samples}, theta.
/// Unknown keys and type mismatches are ConfigErrors naming the key path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
// Throws IoError if the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical form: every key present, threshold resolved to an explicit c or
// schedule. parse_config(serialize_config(c)) reproduces c.
nlohmann::json serialize_config(const ExperimentConfig& cfg);

}  // namespace gpptest
