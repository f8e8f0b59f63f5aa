#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace gpptest {

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitPass = 0,
  kExitScientificFailure = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
};

// Real number with 17 significant digits, shortest notation ("nan", "inf"
// for non-finite values).
std::string format_real(double value);

// Lowercase hex SHA-256 of a file's contents. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

// UTC time as 2026-01-31T12:34:56Z.
std::string iso_timestamp_now();

/// Record written next to every output as <out>.manifest.json.
struct RunManifest {
  std::string tool_version;
  std::string command;
  nlohmann::json config;  // resolved config (or command parameters)
  unsigned long long seed = 0;
  std::string started;
  std::string finished;
  struct Output {
    std::string path;
    std::string sha256;
  };
  std::vector<Output> outputs;
  nlohmann::json results;

  nlohmann::json to_json() const;
};

std::filesystem::path manifest_path(const std::filesystem::path& out);

// Entry point of the `gpptest` tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gpptest
