// Copyright 2026 The ndiscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ndi {

// Input violates a documented contract. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Volume file with a bad magic number or unsupported version.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Volume file whose payload is shorter than its header declares.
class TruncatedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Decoded data breaks a domain invariant (e.g. unsupported sample count).
class InvariantError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// AP requested over a dataset with no ground-truth instances.
class UndefinedMetricError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Filesystem or stream failure. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ndi
