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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "blockadapt/config.hpp"
#include "blockadapt/errors.hpp"
#include "blockadapt/model.hpp"
#include "blockadapt/runner.hpp"
#include "blockadapt/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::vector<std::size_t> parse_widths(const std::string& csv) {
  std::vector<std::size_t> widths;
  std::stringstream in(csv);
  std::string part;
  while (std::getline(in, part, ',')) widths.push_back(std::stoull(part));
  return widths;
}

void apply_overrides(blockadapt::cli::RunConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& threads) {
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  cfg.validate();
}

int cmd_run(const std::string& config_path, const std::string& out,
            const std::optional<std::uint64_t>& seed, const std::optional<int>& threads) {
  blockadapt::cli::RunConfig cfg = blockadapt::cli::parse_config_file(config_path);
  apply_overrides(cfg, seed, threads);
  const auto result = blockadapt::cli::run_experiment(cfg, std::filesystem::path(out));
  std::cout << result.summary_json;
  return kExitOk;
}

int cmd_compare(const std::string& config_a, const std::string& config_b,
                const std::string& out, const std::optional<std::uint64_t>& seed,
                const std::optional<int>& threads) {
  blockadapt::cli::RunConfig a = blockadapt::cli::parse_config_file(config_a);
  blockadapt::cli::RunConfig b = blockadapt::cli::parse_config_file(config_b);
  apply_overrides(a, seed, threads);
  apply_overrides(b, seed, threads);
  const auto result = blockadapt::cli::run_compare(a, b, std::filesystem::path(out));
  std::cout << result.summary_json;
  return kExitOk;
}

int cmd_gradcheck(const std::string& widths_csv, const std::string& head,
                  std::uint64_t seed, std::size_t probes) {
  blockadapt::model::MlpSpec spec;
  spec.widths = parse_widths(widths_csv);
  if (head == "sigmoid_bce")
    spec.head = blockadapt::model::Head::kSigmoidBce;
  else if (head == "softmax_ce")
    spec.head = blockadapt::model::Head::kSoftmaxCe;
  else
    throw blockadapt::ConfigError("gradcheck: unknown head \"" + head + "\"");
  const auto report = blockadapt::model::gradient_check(spec, seed, probes);
  std::cout << "probes: " << report.probes
            << "\nmax_rel_error: " << report.max_rel_error
            << "\ntolerance: " << blockadapt::model::kGradCheckTol
            << "\nresult: " << (report.pass ? "pass" : "fail") << "\n";
  return report.pass ? kExitOk : kExitNumerical;
}

int cmd_selftest(const std::string& mnist_dir, const std::string& out,
                 const std::string& only) {
  blockadapt::selftest::Options options;
  std::string dir = mnist_dir;
  if (dir.empty())
    if (const char* env = std::getenv("BLOCKADAPT_MNIST_DIR")) dir = env;
  if (!dir.empty()) {
    const auto images = std::filesystem::path(dir) / "train-images-idx3-ubyte";
    const auto labels = std::filesystem::path(dir) / "train-labels-idx1-ubyte";
    if (std::filesystem::exists(images) && std::filesystem::exists(labels)) {
      options.mnist_images = images.string();
      options.mnist_labels = labels.string();
    } else {
      std::cerr << "note: " << dir
                << " does not contain train-images-idx3-ubyte/train-labels-idx1-ubyte;"
                   " using the synthetic surrogate\n";
    }
  }
  if (!out.empty()) options.scratch_dir = out;
  options.only = only;
  const auto results = blockadapt::selftest::run_acceptance(options, std::cout);
  const int fails = blockadapt::selftest::count_failures(results);
  if (results.empty()) {
    std::cerr << "selftest: unknown criterion \"" << only << "\"\n";
    return kExitUsage;
  }
  std::cout << (fails == 0 ? "all criteria passed\n"
                           : std::to_string(fails) + " criteria failed\n");
  return fails == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive gradient optimizers with block-diagonal matrix adaptation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string config_a;
  std::string config_b;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  auto* run = app.add_subcommand("run", "train per a config file, writing trace.csv and summary.json");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out", out, "output directory (default .)");
  run->add_option("--seed", seed, "override config seed");
  run->add_option("--threads", threads, "override config threads");

  auto* compare = app.add_subcommand("compare", "run two configs in lockstep and join their traces");
  compare->add_option("--config-a", config_a, "first config")->required();
  compare->add_option("--config-b", config_b, "second config")->required();
  compare->add_option("--out", out, "output directory (default .)");
  compare->add_option("--seed", seed, "override both seeds");
  compare->add_option("--threads", threads, "override both thread counts");

  std::string widths = "2,2,2,1";
  std::string head = "sigmoid_bce";
  std::uint64_t gc_seed = 0;
  std::size_t probes = 200;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the model gradients");
  gradcheck->add_option("--widths", widths, "layer widths, comma separated");
  gradcheck->add_option("--head", head, "sigmoid_bce|softmax_ce");
  gradcheck->add_option("--seed", gc_seed, "init/batch seed");
  gradcheck->add_option("--probes", probes, "max sampled parameters");

  std::string mnist_dir;
  std::string selftest_out;
  std::string only;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--mnist-dir", mnist_dir,
                       "directory with MNIST train files (else synthetic surrogate)");
  selftest->add_option("--out", selftest_out, "scratch directory");
  selftest->add_option("--only", only, "run a single criterion (A1..A9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out, seed, threads);
    if (compare->parsed()) return cmd_compare(config_a, config_b, out, seed, threads);
    if (gradcheck->parsed()) return cmd_gradcheck(widths, head, gc_seed, probes);
    if (selftest->parsed()) return cmd_selftest(mnist_dir, selftest_out, only);
  } catch (const blockadapt::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const blockadapt::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const blockadapt::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
