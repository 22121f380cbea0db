#pragma once

#include <stdexcept>
#include <string>

namespace gclt {

// Malformed or invalid run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// CFL violation, NaN or overflow during a solve (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Evaluator asked for more work than its configured budget (CLI exit code 4).
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace gclt
