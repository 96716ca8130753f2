#pragma once

#include <stdexcept>
#include <string>

namespace symmwig {

// Bad input: out-of-range indices, malformed configuration, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An enumeration or workspace would exceed its explicit budget. Never a silent truncation.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symmwig
