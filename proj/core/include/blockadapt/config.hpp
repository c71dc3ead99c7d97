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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blockadapt/data.hpp"
#include "blockadapt/model.hpp"
#include "blockadapt/optimizer.hpp"

namespace blockadapt::cli {

// A fully-resolved experiment description. Parsed from a flat
// `key = value` text file (one pair per line, `#` comments).
struct RunConfig {
  enum class DatasetKind { kToy, kMnist };
  enum class PartitionKind { kDiag, kChunk, kInputNeuron, kLeadingAxis, kFull };
  enum class LrKind { kConstant, kInvSqrt, kStepDecay };

  DatasetKind dataset = DatasetKind::kToy;
  std::string mnist_images;
  std::string mnist_labels;

  std::vector<std::size_t> widths = {2, 2, 2, 1};
  model::Head head = model::Head::kSigmoidBce;

  optim::Design design = optim::Design::adam();
  double epsilon = 1e-4;  // diagonal-engine shift; defaults to design.delta

  PartitionKind partition = PartitionKind::kDiag;
  std::size_t block_size = 0;

  LrKind lr = LrKind::kConstant;
  double alpha = 0.0;
  std::vector<std::uint64_t> lr_milestones;
  double lr_factor = 0.1;

  bool clip = false;
  double clip_gamma = 0.0;
  double clip_alpha_star = 0.0;

  data::BatchSchedule batch = data::BatchSchedule::fixed(128);

  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> epochs;
  std::uint64_t seed = 0;
  std::uint64_t diag_every = 10;
  bool timing = false;  // off keeps trace files byte-deterministic
  int threads = 1;

  std::string checkpoint_out;
  std::string resume;
  std::optional<double> lipschitz_l;

  // Step size at step t per the configured schedule.
  double alpha_at(std::uint64_t t) const;

  // Resolved settings as ordered key/value pairs (summary echo).
  std::vector<std::pair<std::string, std::string>> echo() const;

  // Cross-field checks beyond per-key parsing. Throws ConfigError.
  void validate() const;
};

// Throws ConfigError with the source name and line number on bad input.
RunConfig parse_config_text(const std::string& text, const std::string& source_name);
RunConfig parse_config_file(const std::filesystem::path& path);

}  // namespace blockadapt::cli
