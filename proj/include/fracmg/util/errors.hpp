#pragma once

#include <stdexcept>
#include <string>

namespace fracmg {

/// Invalid parameter combination (material, solver or run configuration).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested problem exceeds the supported size.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracmg
