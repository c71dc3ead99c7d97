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
#include <optional>
#include <string>
#include <vector>

#include "blockadapt/config.hpp"
#include "blockadapt/diagnostics.hpp"

namespace blockadapt::cli {

struct RunOutput {
  std::vector<diagnostics::TraceRecord> trace;
  std::string trace_csv;    // exact bytes written to trace.csv
  std::string summary_json; // exact bytes written to summary.json
  double final_loss = 0.0;
  double eval_accuracy = 0.0;
  std::optional<double> min_grad_norm_sq;
  std::uint64_t steps_run = 0;
  std::vector<double> final_params;
};

// Executes a configured run. When out_dir is set, writes trace.csv and
// summary.json there (creating the directory). All outputs are
// deterministic byte-for-byte given (config, seed) with timing off.
RunOutput run_experiment(const RunConfig& cfg,
                         const std::optional<std::filesystem::path>& out_dir);

struct CompareOutput {
  RunOutput a;
  RunOutput b;
  std::string joined_csv;    // rows keyed by t with _a/_b suffixed columns
  std::string summary_json;
  double param_maxdiff_max = 0.0;
};

// Runs two configs in lockstep. They must share dataset, model, seed and
// step count; partition, design and schedules may differ. The joined CSV
// carries a param_maxdiff column with the max-abs parameter gap between
// the trajectories at each logged step.
CompareOutput run_compare(const RunConfig& a, const RunConfig& b,
                          const std::optional<std::filesystem::path>& out_dir);

}  // namespace blockadapt::cli
