#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpptest {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature ran out of depth; carries the best estimate reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

// A generator or W-model violates its defining constraints.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration; `key_path()` names the offending entry
// (e.g. "threshold.schedule.gamma"), empty when not tied to a key.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string key_path = {})
      : Error(key_path.empty() ? what : key_path + ": " + what),
        key_path_(std::move(key_path)) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

// A statistic needs at least one exceedance and the sample has none.
class NoExceedanceError : public Error {
 public:
  using Error::Error;
};

// Local alternative falls outside the admissible parameter set.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Likelihood evaluation hit a nonpositive density.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::size_t replication = npos)
      : Error(what), replication_(replication) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t replication() const noexcept { return replication_; }

 private:
  std::size_t replication_;
};

// Not enough usable replications for a distributional check.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpptest
