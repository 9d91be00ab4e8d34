// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace echoes {

// Caller violated an operation's precondition (bad index, mismatched dtypes).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An FFT job or bus configuration the hardware cannot run.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Memory model misuse: out-of-range addresses, capacity overflow.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace echoes
