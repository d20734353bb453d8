// Copyright 2026 the sddjd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sddjd {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Incompatible matrix/vector shapes.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// A problem specification violates its invariants (bad sizes, fractions, ...).
class SpecError : public Error {
 public:
  explicit SpecError(const std::string& msg) : Error(msg) {}
};

/// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Input is degenerate in a way that makes the requested operation meaningless
/// (e.g. normalizing a zero column).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& msg) : Error(msg) {}
};

/// The coefficient matrix of the mixing update is singular even after
/// regularization (all diagonal factors near zero).
class DegenerateModelError : public Error {
 public:
  explicit DegenerateModelError(const std::string& msg) : Error(msg) {}
};

/// The mixing matrix lost column rank (collinear or zero columns).
class DegenerateMixingError : public Error {
 public:
  explicit DegenerateMixingError(const std::string& msg) : Error(msg) {}
};

/// A gain matrix with an all-zero row or column.
class DegenerateGainError : public Error {
 public:
  explicit DegenerateGainError(const std::string& msg) : Error(msg) {}
};

/// File system / serialization failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace sddjd
