// Copyright 2026 The switchsim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace switchsim {

/// Malformed or inconsistent configuration / input data. CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure (missing file, unwritable directory). CLI exit code 3.
class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A Fock-space operation lost more norm than its truncation budget allows.
/// CLI exit code 5.
class TruncationError : public std::runtime_error {
  public:
    TruncationError(const std::string& msg, double norm_loss, double budget)
        : std::runtime_error(msg), norm_loss(norm_loss), budget(budget) {}

    double norm_loss;
    double budget;
};

}  // namespace switchsim
