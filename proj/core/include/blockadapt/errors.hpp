// Copyright 2026 The blockadapt Authors
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

namespace blockadapt {

// Base class for failures that map to CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad config file or invalid run description (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed dataset (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown: non-finite values, PSD violations, divergence
// (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace blockadapt
