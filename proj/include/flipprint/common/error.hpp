// Copyright 2026, The flipprint authors
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

#ifndef FLIPPRINT_COMMON_ERROR_HPP_
#define FLIPPRINT_COMMON_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flipprint {

/// Invalid configuration (population spec, mapping file, scenario config).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call whose arguments violate the operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input on which the requested quantity is not defined (e.g. JSD of an empty
/// distribution, Jaccard of two empty sets).
class UndefinedInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Timing probes ruled out every candidate geometry.
class InferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persisted records that cannot be loaded. Carries the 1-based line number
/// of the offending record (0 when the problem is not tied to a line).
class RecordError : public std::runtime_error {
 public:
  RecordError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace flipprint

#endif  // FLIPPRINT_COMMON_ERROR_HPP_
