/*
 * Copyright 2026 The uqreg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UQREG_ERROR_HPP_
#define UQREG_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace uqreg {

// Numeric values double as CLI exit codes and C API return codes.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidInput = 1,
  kConfig = 2,
  kTraining = 3,
  kIo = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Precondition violations on numeric inputs (dimension mismatch, bad domain).
class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& m)
      : Error(ErrorCode::kInvalidInput, m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCode::kConfig, m) {}
};

// NaN losses/gradients and other failures that abort a training run.
class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& m)
      : Error(ErrorCode::kTraining, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

// Pearson correlation with a constant argument.
class UndefinedCorrelationError : public InvalidInputError {
 public:
  explicit UndefinedCorrelationError(const std::string& m)
      : InvalidInputError(m) {}
};

}  // namespace uqreg

#endif  // UQREG_ERROR_HPP_
