#pragma once

#include <stdexcept>
#include <string>

namespace eprsim {

/// Configuration / schema problems (bad JSON, unknown keys, out-of-range values).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Model-level inconsistencies discovered while computing (non-PSD spectra,
/// mismatched frame sets, degenerate references).
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File I/O failures (missing files, short reads, corrupt containers).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace eprsim
