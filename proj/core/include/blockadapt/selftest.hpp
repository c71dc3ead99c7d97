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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace blockadapt::selftest {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  // Real MNIST training files; when empty, the term-dynamics comparison
  // runs on a bundled synthetic surrogate of the same architecture.
  std::string mnist_images;
  std::string mnist_labels;
  // Scratch directory for run outputs; a temp directory when empty.
  std::filesystem::path scratch_dir;
  // Run a single criterion ("A1".."A9") when non-empty.
  std::string only;
};

// Executes the acceptance suite, printing one PASS/FAIL line per
// criterion to log as it goes.
std::vector<CriterionResult> run_acceptance(const Options& options, std::ostream& log);

int count_failures(const std::vector<CriterionResult>& results);

}  // namespace blockadapt::selftest
