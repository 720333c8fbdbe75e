#pragma once

#include <stdexcept>
#include <string>

namespace pmtm {

// Caller broke a documented precondition (bad index, wrong dimension, ...).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// Invalid or unreadable experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace pmtm
