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

#include "blockadapt/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blockadapt/errors.hpp"
#include "blockadapt/rng.hpp"

namespace blockadapt::data {

BatchSchedule BatchSchedule::fixed(std::size_t m) {
  if (m == 0) throw std::invalid_argument("BatchSchedule: fixed size must be >= 1");
  return {Mode::kFixed, m, 1.0};
}

BatchSchedule BatchSchedule::linear(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("BatchSchedule: linear slope must be > 0");
  return {Mode::kLinear, 1, c};
}

std::size_t BatchSchedule::batch_size(std::uint64_t t, std::size_t n) const {
  if (t == 0) throw std::invalid_argument("BatchSchedule: t must be >= 1");
  if (mode == Mode::kFixed) return fixed_m;
  const double m = std::ceil(linear_c * static_cast<double>(t));
  return std::min<std::size_t>(n, static_cast<std::size_t>(std::max(m, 1.0)));
}

ToyProblem gen_toy(std::uint64_t seed) {
  const model::MlpSpec spec{{2, 2, 2, 1}, model::Head::kSigmoidBce};
  Rng rng(seed);

  ToyProblem out;
  out.teacher.layout = spec.layout();
  out.teacher.values.assign(spec.param_count(), 0.0);
  for (const auto& tensor : out.teacher.layout.tensors()) {
    if (tensor.shape.size() == 1) continue;  // biases stay zero
    for (std::size_t k = 0; k < tensor.size(); ++k)
      out.teacher.values[tensor.offset + k] = rng.normal();
  }

  const std::size_t n = 10;
  out.dataset.X = Matrix(n, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j) out.dataset.X(i, j) = rng.normal();

  const Matrix probs = model::predict_probs(out.teacher, spec, out.dataset.X);
  out.dataset.y.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.dataset.y[i] = rng.uniform01() < probs(i, 0) ? 1 : 0;

  out.dataset.name = "toy";
  out.dataset.num_classes = 2;
  return out;
}

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("idx: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

std::uint32_t be32(const std::string& buf, std::size_t off) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k)
    v = (v << 8) | static_cast<unsigned char>(buf[off + k]);
  return v;
}

void put_be32(std::string& buf, std::uint32_t v) {
  for (int k = 3; k >= 0; --k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

void check_size(const std::string& path, std::size_t expected, std::size_t actual) {
  if (actual != expected)
    throw DataError("idx: " + path + " truncated or oversized (expected " +
                    std::to_string(expected) + " bytes, got " + std::to_string(actual) +
                    ")");
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const std::string img = read_all(images_path);
  if (img.size() < 4) check_size(images_path, 4, img.size());
  const std::uint32_t img_magic = be32(img, 0);
  if (img_magic != kImageMagic)
    throw DataError("idx: " + images_path + " has magic " + hex32(img_magic) +
                    ", expected " + hex32(kImageMagic));
  if (img.size() < 16) check_size(images_path, 16, img.size());
  const std::size_t n = be32(img, 4);
  const std::size_t rows = be32(img, 8);
  const std::size_t cols = be32(img, 12);
  check_size(images_path, 16 + n * rows * cols, img.size());

  const std::string lab = read_all(labels_path);
  if (lab.size() < 4) check_size(labels_path, 4, lab.size());
  const std::uint32_t lab_magic = be32(lab, 0);
  if (lab_magic != kLabelMagic)
    throw DataError("idx: " + labels_path + " has magic " + hex32(lab_magic) +
                    ", expected " + hex32(kLabelMagic));
  if (lab.size() < 8) check_size(labels_path, 8, lab.size());
  const std::size_t n_lab = be32(lab, 4);
  check_size(labels_path, 8 + n_lab, lab.size());

  if (n != n_lab)
    throw DataError("idx: image count " + std::to_string(n) + " != label count " +
                    std::to_string(n_lab));
  if (n == 0) throw DataError("idx: empty dataset in " + images_path);

  Dataset ds;
  const std::size_t p = rows * cols;
  ds.X = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < p; ++k)
      ds.X(i, k) =
          static_cast<double>(static_cast<unsigned char>(img[16 + i * p + k])) / 255.0;
  ds.y.resize(n);
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ds.y[i] = static_cast<unsigned char>(lab[8 + i]);
    max_label = std::max(max_label, ds.y[i]);
  }
  ds.num_classes = max_label + 1;
  ds.name = images_path;
  return ds;
}

void save_idx(const std::string& images_path, const std::string& labels_path,
              const Dataset& ds) {
  if (ds.X.rows() == 0) throw std::invalid_argument("save_idx: empty dataset");
  std::string img;
  put_be32(img, kImageMagic);
  put_be32(img, static_cast<std::uint32_t>(ds.X.rows()));
  put_be32(img, 1);
  put_be32(img, static_cast<std::uint32_t>(ds.X.cols()));
  for (std::size_t i = 0; i < ds.X.rows(); ++i)
    for (std::size_t k = 0; k < ds.X.cols(); ++k) {
      const double v = std::clamp(ds.X(i, k), 0.0, 1.0);
      img.push_back(static_cast<char>(std::lround(v * 255.0)));
    }

  std::string lab;
  put_be32(lab, kLabelMagic);
  put_be32(lab, static_cast<std::uint32_t>(ds.y.size()));
  for (int label : ds.y) lab.push_back(static_cast<char>(label & 0xff));

  std::ofstream iout(images_path, std::ios::binary | std::ios::trunc);
  if (!iout) throw DataError("idx: cannot open " + images_path + " for writing");
  iout.write(img.data(), static_cast<std::streamsize>(img.size()));
  std::ofstream lout(labels_path, std::ios::binary | std::ios::trunc);
  if (!lout) throw DataError("idx: cannot open " + labels_path + " for writing");
  lout.write(lab.data(), static_cast<std::streamsize>(lab.size()));
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m, std::uint64_t t,
                                        std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_indices: empty population");
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ t);
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t x = splitmix64(key + i);
    idx[i] = static_cast<std::size_t>(
        (static_cast<unsigned __int128>(x) * n) >> 64);
  }
  return idx;
}

Batch sample_batch(const Dataset& ds, const BatchSchedule& schedule, std::uint64_t t,
                   std::uint64_t seed) {
  const std::size_t n = ds.X.rows();
  const std::size_t m = schedule.batch_size(t, n);
  const auto idx = sample_indices(n, m, t, seed);
  Batch batch;
  batch.X = Matrix(m, ds.X.cols());
  batch.y.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto src = ds.X.row(idx[i]);
    std::copy(src.begin(), src.end(), batch.X.row(i).begin());
    batch.y[i] = ds.y[idx[i]];
  }
  return batch;
}

}  // namespace blockadapt::data
