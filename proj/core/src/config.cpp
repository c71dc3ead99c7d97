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

#include "blockadapt/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "blockadapt/errors.hpp"

namespace blockadapt::cli {

double RunConfig::alpha_at(std::uint64_t t) const {
  switch (lr) {
    case LrKind::kConstant:
      return alpha;
    case LrKind::kInvSqrt:
      return alpha / std::sqrt(static_cast<double>(t));
    case LrKind::kStepDecay: {
      double a = alpha;
      for (std::uint64_t m : lr_milestones)
        if (t >= m) a *= lr_factor;
      return a;
    }
  }
  return alpha;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

const char* dataset_name(RunConfig::DatasetKind k) {
  return k == RunConfig::DatasetKind::kToy ? "toy" : "mnist";
}

const char* partition_name(RunConfig::PartitionKind k) {
  switch (k) {
    case RunConfig::PartitionKind::kDiag: return "diag";
    case RunConfig::PartitionKind::kChunk: return "chunk";
    case RunConfig::PartitionKind::kInputNeuron: return "input_neuron";
    case RunConfig::PartitionKind::kLeadingAxis: return "leading_axis";
    case RunConfig::PartitionKind::kFull: return "full";
  }
  return "?";
}

const char* lr_name(RunConfig::LrKind k) {
  switch (k) {
    case RunConfig::LrKind::kConstant: return "constant";
    case RunConfig::LrKind::kInvSqrt: return "inv_sqrt";
    case RunConfig::LrKind::kStepDecay: return "step_decay";
  }
  return "?";
}

// Key/value store with per-key line tracking for error messages.
class KvSource {
 public:
  KvSource(const std::string& text, std::string name) : name_(std::move(name)) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string stripped = trim(line.substr(0, line.find('#')));
      if (stripped.empty()) continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos)
        fail(lineno, "expected `key = value`, got \"" + stripped + "\"");
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty()) fail(lineno, "empty key");
      if (entries_.count(key)) fail(lineno, "duplicate key \"" + key + "\"");
      entries_[key] = {value, lineno};
    }
  }

  [[noreturn]] void fail(int lineno, const std::string& msg) const {
    throw ConfigError(name_ + ":" + std::to_string(lineno) + ": " + msg);
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    const auto it = entries_.find(key);
    const int lineno = it == entries_.end() ? 0 : it->second.second;
    throw ConfigError(name_ + ":" + std::to_string(lineno) + ": " + key + ": " + msg);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second.first;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError(name_ + ": missing required key \"" + key + "\"");
    return *v;
  }

  double get_double(const std::string& key, double fallback) {
    auto v = get(key);
    if (!v) return fallback;
    return parse_double(key, *v);
  }

  double parse_double(const std::string& key, const std::string& raw) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      return d;
    } catch (...) {
      fail_key(key, "not a number: \"" + raw + "\"");
    }
  }

  std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
    try {
      std::size_t pos = 0;
      if (!raw.empty() && raw[0] == '-') throw std::invalid_argument("");
      const std::uint64_t v = std::stoull(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      fail_key(key, "not a non-negative integer: \"" + raw + "\"");
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
    auto v = get(key);
    if (!v) return fallback;
    return parse_u64(key, *v);
  }

  void check_all_consumed() const {
    for (const auto& [key, value] : entries_)
      if (!consumed_.count(key))
        throw ConfigError(name_ + ":" + std::to_string(value.second) +
                          ": unknown key \"" + key + "\"");
  }

 private:
  std::string name_;
  std::map<std::string, std::pair<std::string, int>> entries_;
  std::set<std::string> consumed_;
};

std::vector<std::uint64_t> parse_u64_list(KvSource& kv, const std::string& key,
                                          const std::string& raw) {
  std::vector<std::uint64_t> out;
  std::istringstream in(raw);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(kv.parse_u64(key, trim(part)));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  try {
    design.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  model::MlpSpec spec{widths, head};
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (steps.has_value() == epochs.has_value())
    throw ConfigError("config: exactly one of steps/epochs must be set");
  if (epochs && batch.mode != data::BatchSchedule::Mode::kFixed)
    throw ConfigError("config: epochs requires a fixed batch schedule");
  if (!(alpha > 0.0)) throw ConfigError("config: alpha must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be positive");
  if (partition != PartitionKind::kDiag && partition != PartitionKind::kFull &&
      block_size == 0)
    throw ConfigError("config: partition " + std::string(partition_name(partition)) +
                      " requires block_size >= 1");
  if (clip) {
    if (!(clip_gamma > 0.0) || !(clip_alpha_star > 0.0))
      throw ConfigError("config: clipping requires clip_gamma > 0 and clip_alpha_star > 0");
    if (partition == PartitionKind::kDiag)
      throw ConfigError("config: spectrum clipping applies to block partitions only");
  }
  if (dataset == DatasetKind::kMnist && (mnist_images.empty() || mnist_labels.empty()))
    throw ConfigError("config: mnist dataset requires mnist_images and mnist_labels");
  if (dataset == DatasetKind::kToy && widths.front() != 2)
    throw ConfigError("config: toy dataset has 2 input features");
  if (diag_every == 0) throw ConfigError("config: diag_every must be >= 1");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
  if (lr == LrKind::kStepDecay && lr_milestones.empty())
    throw ConfigError("config: step_decay requires lr_milestones");
  if (lipschitz_l && !(*lipschitz_l > 0.0))
    throw ConfigError("config: lipschitz_l must be positive");
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("dataset", dataset_name(dataset));
  if (dataset == DatasetKind::kMnist) {
    kv.emplace_back("mnist_images", mnist_images);
    kv.emplace_back("mnist_labels", mnist_labels);
  }
  kv.emplace_back("model", join(widths));
  kv.emplace_back("head", head == model::Head::kSigmoidBce ? "sigmoid_bce" : "softmax_ce");
  kv.emplace_back("design", optim::variant_name(design.variant));
  kv.emplace_back("beta1", fmt_double(design.beta1));
  kv.emplace_back("beta1_decay",
                  design.decay.mode == optim::Beta1Decay::Mode::kConstant
                      ? "constant"
                      : "exponential");
  if (design.decay.mode == optim::Beta1Decay::Mode::kExponential)
    kv.emplace_back("beta1_lambda", fmt_double(design.decay.lambda));
  kv.emplace_back("beta2", fmt_double(design.beta2));
  kv.emplace_back("delta", fmt_double(design.delta));
  kv.emplace_back("epsilon", fmt_double(epsilon));
  kv.emplace_back("partition", partition_name(partition));
  if (block_size > 0) kv.emplace_back("block_size", std::to_string(block_size));
  kv.emplace_back("lr", lr_name(lr));
  kv.emplace_back("alpha", fmt_double(alpha));
  if (lr == LrKind::kStepDecay) {
    kv.emplace_back("lr_milestones", join(lr_milestones));
    kv.emplace_back("lr_factor", fmt_double(lr_factor));
  }
  kv.emplace_back("clip", clip ? "on" : "off");
  if (clip) {
    kv.emplace_back("clip_gamma", fmt_double(clip_gamma));
    kv.emplace_back("clip_alpha_star", fmt_double(clip_alpha_star));
  }
  kv.emplace_back("batch", batch.mode == data::BatchSchedule::Mode::kFixed ? "fixed"
                                                                           : "linear");
  if (batch.mode == data::BatchSchedule::Mode::kFixed)
    kv.emplace_back("batch_size", std::to_string(batch.fixed_m));
  else
    kv.emplace_back("batch_c", fmt_double(batch.linear_c));
  if (steps) kv.emplace_back("steps", std::to_string(*steps));
  if (epochs) kv.emplace_back("epochs", std::to_string(*epochs));
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("diag_every", std::to_string(diag_every));
  kv.emplace_back("timing", timing ? "on" : "off");
  kv.emplace_back("threads", std::to_string(threads));
  if (!checkpoint_out.empty()) kv.emplace_back("checkpoint_out", checkpoint_out);
  if (!resume.empty()) kv.emplace_back("resume", resume);
  if (lipschitz_l) kv.emplace_back("lipschitz_l", fmt_double(*lipschitz_l));
  return kv;
}

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
  KvSource kv(text, source_name);
  RunConfig cfg;

  if (auto v = kv.get("dataset")) {
    if (*v == "toy")
      cfg.dataset = RunConfig::DatasetKind::kToy;
    else if (*v == "mnist")
      cfg.dataset = RunConfig::DatasetKind::kMnist;
    else
      kv.fail_key("dataset", "expected toy|mnist, got \"" + *v + "\"");
  }
  cfg.mnist_images = kv.get("mnist_images").value_or("");
  cfg.mnist_labels = kv.get("mnist_labels").value_or("");

  if (auto v = kv.get("model")) {
    cfg.widths.clear();
    std::istringstream in(*v);
    std::string part;
    while (std::getline(in, part, ','))
      cfg.widths.push_back(kv.parse_u64("model", trim(part)));
    if (cfg.widths.size() < 2)
      kv.fail_key("model", "need at least two comma-separated widths");
  } else if (cfg.dataset == RunConfig::DatasetKind::kMnist) {
    cfg.widths = {784, 100, 10};
  }

  bool head_given = false;
  if (auto v = kv.get("head")) {
    head_given = true;
    if (*v == "sigmoid_bce")
      cfg.head = model::Head::kSigmoidBce;
    else if (*v == "softmax_ce")
      cfg.head = model::Head::kSoftmaxCe;
    else
      kv.fail_key("head", "expected sigmoid_bce|softmax_ce, got \"" + *v + "\"");
  }
  if (!head_given)
    cfg.head = cfg.widths.back() == 1 ? model::Head::kSigmoidBce : model::Head::kSoftmaxCe;

  optim::Design design;
  const std::string design_name = kv.get("design").value_or("adam");
  if (design_name == "sgd")
    design = optim::Design::sgd();
  else if (design_name == "adagrad")
    design = optim::Design::adagrad();
  else if (design_name == "adafom")
    design = optim::Design::adafom();
  else if (design_name == "rmsprop")
    design = optim::Design::rmsprop();
  else if (design_name == "adam")
    design = optim::Design::adam();
  else if (design_name == "amsgrad")
    design = optim::Design::amsgrad();
  else
    kv.fail_key("design", "unknown design \"" + design_name + "\"");
  design.beta1 = kv.get_double("beta1", design.beta1);
  design.beta2 = kv.get_double("beta2", design.beta2);
  design.delta = kv.get_double("delta", design.delta);
  if (auto v = kv.get("beta1_decay")) {
    if (*v == "constant")
      design.decay.mode = optim::Beta1Decay::Mode::kConstant;
    else if (*v == "exponential")
      design.decay.mode = optim::Beta1Decay::Mode::kExponential;
    else
      kv.fail_key("beta1_decay", "expected constant|exponential, got \"" + *v + "\"");
  }
  if (design.decay.mode == optim::Beta1Decay::Mode::kExponential)
    design.decay.lambda = kv.parse_double("beta1_lambda", kv.require("beta1_lambda"));
  cfg.design = design;
  cfg.epsilon = kv.get_double("epsilon", design.delta);

  if (auto v = kv.get("partition")) {
    if (*v == "diag")
      cfg.partition = RunConfig::PartitionKind::kDiag;
    else if (*v == "chunk")
      cfg.partition = RunConfig::PartitionKind::kChunk;
    else if (*v == "input_neuron")
      cfg.partition = RunConfig::PartitionKind::kInputNeuron;
    else if (*v == "leading_axis")
      cfg.partition = RunConfig::PartitionKind::kLeadingAxis;
    else if (*v == "full")
      cfg.partition = RunConfig::PartitionKind::kFull;
    else
      kv.fail_key("partition",
                  "expected diag|chunk|input_neuron|leading_axis|full, got \"" + *v + "\"");
  }
  cfg.block_size = kv.get_u64("block_size", 0);

  if (auto v = kv.get("lr")) {
    if (*v == "constant")
      cfg.lr = RunConfig::LrKind::kConstant;
    else if (*v == "inv_sqrt")
      cfg.lr = RunConfig::LrKind::kInvSqrt;
    else if (*v == "step_decay")
      cfg.lr = RunConfig::LrKind::kStepDecay;
    else
      kv.fail_key("lr", "expected constant|inv_sqrt|step_decay, got \"" + *v + "\"");
  }
  cfg.alpha = kv.parse_double("alpha", kv.require("alpha"));
  if (auto v = kv.get("lr_milestones")) cfg.lr_milestones = parse_u64_list(kv, "lr_milestones", *v);
  cfg.lr_factor = kv.get_double("lr_factor", 0.1);

  if (auto v = kv.get("clip")) {
    if (*v == "on")
      cfg.clip = true;
    else if (*v == "off")
      cfg.clip = false;
    else
      kv.fail_key("clip", "expected on|off, got \"" + *v + "\"");
  }
  cfg.clip_gamma = kv.get_double("clip_gamma", 0.0);
  cfg.clip_alpha_star = kv.get_double("clip_alpha_star", 0.0);

  std::string batch_mode = kv.get("batch").value_or("fixed");
  if (batch_mode == "fixed") {
    cfg.batch = data::BatchSchedule::fixed(kv.get_u64("batch_size", 128));
  } else if (batch_mode == "linear") {
    cfg.batch = data::BatchSchedule::linear(
        kv.parse_double("batch_c", kv.require("batch_c")));
  } else {
    kv.fail_key("batch", "expected fixed|linear, got \"" + batch_mode + "\"");
  }

  if (auto v = kv.get("steps")) cfg.steps = kv.parse_u64("steps", *v);
  if (auto v = kv.get("epochs")) cfg.epochs = kv.parse_u64("epochs", *v);
  cfg.seed = kv.get_u64("seed", 0);
  cfg.diag_every = kv.get_u64("diag_every", 10);
  if (auto v = kv.get("timing")) {
    if (*v == "on")
      cfg.timing = true;
    else if (*v == "off")
      cfg.timing = false;
    else
      kv.fail_key("timing", "expected on|off, got \"" + *v + "\"");
  }
  cfg.threads = static_cast<int>(kv.get_u64("threads", 1));
  cfg.checkpoint_out = kv.get("checkpoint_out").value_or("");
  cfg.resume = kv.get("resume").value_or("");
  if (auto v = kv.get("lipschitz_l")) cfg.lipschitz_l = kv.parse_double("lipschitz_l", *v);

  kv.check_all_consumed();
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text, path.string());
}

}  // namespace blockadapt::cli
