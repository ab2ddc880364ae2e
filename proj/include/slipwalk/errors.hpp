/*
 Copyright 2026 The slipwalk Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace slipwalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: parameters out of range, malformed files, schema mismatch.
/// Maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Failure while running a valid request. Maps to CLI exit code 3.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

class UncontrollableError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class ConvergenceError : public RuntimeFailure {
 public:
  ConvergenceError(const std::string& what, double residual)
      : RuntimeFailure(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class InfeasibleError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

/// Raised when a model violates an operation's contract, e.g. an impact map
/// evaluated away from the switching surface.
class ContractViolation : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace slipwalk
