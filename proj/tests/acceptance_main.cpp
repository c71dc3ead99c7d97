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

// Acceptance suite runner: executes every criterion (or a single one given
// as argv[1]) and exits with the number of failures. Set
// BLOCKADAPT_MNIST_DIR to run the term-dynamics comparison on real MNIST
// instead of the synthetic surrogate.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "blockadapt/selftest.hpp"

int main(int argc, char** argv) {
  blockadapt::selftest::Options options;
  if (const char* dir = std::getenv("BLOCKADAPT_MNIST_DIR")) {
    const auto images =
        std::filesystem::path(dir) / "train-images-idx3-ubyte";
    const auto labels =
        std::filesystem::path(dir) / "train-labels-idx1-ubyte";
    if (std::filesystem::exists(images) && std::filesystem::exists(labels)) {
      options.mnist_images = images.string();
      options.mnist_labels = labels.string();
    }
  }
  if (argc > 1) options.only = argv[1];

  const auto results = blockadapt::selftest::run_acceptance(options, std::cout);
  if (results.empty()) {
    std::cerr << "unknown criterion \"" << options.only << "\" (expected A1..A9)\n";
    return 1;
  }
  return blockadapt::selftest::count_failures(results);
}
