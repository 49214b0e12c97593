#pragma once

#include <stdexcept>
#include <string>

namespace potnet {

// Invalid user input: bad dimensions in data files, unseen labels, weight
// sums off, malformed schema/config. CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/layer dimension mismatches in the in-process API.
class shape_error : public std::invalid_argument {
public:
  explicit shape_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite values, solver failures, degenerate numerics. CLI maps this
// to exit code 3.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Misuse of the API contract (e.g. backward with a stale cache).
class contract_error : public std::logic_error {
public:
  explicit contract_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace potnet
