// Copyright 2026 The qhomog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qhomog {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid layouts, configs, or presets.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed gates (bad indices, non-unitary matrices).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A value cannot be amplitude encoded (|f| > 1, RY argument out of range).
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// A gate kind the {CNOT, U3} lowering does not know how to decompose.
class LoweringError : public Error {
 public:
  using Error::Error;
};

/// Least-squares or scaling fits that cannot be solved.
class FitError : public Error {
 public:
  using Error::Error;
};

/// The selected physical subspace carries no probability mass.
class EmptyBranchError : public Error {
 public:
  using Error::Error;
};

/// Requested emulation exceeds the configured qubit cap.
class QubitBudgetError : public Error {
 public:
  QubitBudgetError(int required, int budget, const std::string& context = {});
  int required() const { return required_; }
  int budget() const { return budget_; }

 private:
  int required_;
  int budget_;
};

}  // namespace qhomog
