/*
 Copyright 2026 The salad Authors

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

#ifndef SALAD_ERRORS_HPP
#define SALAD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace salad {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Thrown by the Cholesky-based routines when a pivot is not strictly positive.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot_index, double pivot)
      : Error("matrix is not positive definite (pivot " +
              std::to_string(pivot_index) + " = " + std::to_string(pivot) +
              ")"),
        pivot_index_(pivot_index),
        pivot_(pivot) {}

  std::size_t pivot_index() const { return pivot_index_; }
  double pivot() const { return pivot_; }

 private:
  std::size_t pivot_index_;
  double pivot_;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class EnvironmentMismatch : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or gradient during optimization.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace salad

#endif  // SALAD_ERRORS_HPP
