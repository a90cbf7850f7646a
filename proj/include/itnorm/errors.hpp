// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace itnorm {

// Caller passed arguments that violate an operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operand outside an operation's mathematical domain (NaN/Inf, x <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed external data (vector files, config files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An intermediate left the representable range of the target format.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

}  // namespace itnorm
