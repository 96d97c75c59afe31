#pragma once

#include <stdexcept>
#include <string>

namespace gencfl {

// Configuration problems (bad file, bad values). CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dataset problems (missing/corrupt IDX files). CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  enum class Kind { Io, BadMagic, Truncated, CountMismatch };

  DataError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Unrecoverable runtime failures in the training loop. CLI exit code 3.
class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gencfl
