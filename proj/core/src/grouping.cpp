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

#include "blockadapt/grouping.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace blockadapt::grouping {

namespace {

std::vector<std::size_t> prefix_offsets(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> offsets(sizes.size() + 1, 0);
  for (std::size_t j = 0; j < sizes.size(); ++j)
    offsets[j + 1] = offsets[j] + sizes[j];
  return offsets;
}

}  // namespace

Partition Partition::from_sizes(std::vector<std::size_t> sizes) {
  if (sizes.empty()) throw std::invalid_argument("Partition: no groups");
  for (std::size_t n : sizes)
    if (n == 0) throw std::invalid_argument("Partition: empty group");
  Partition p;
  p.offsets_ = prefix_offsets(sizes);
  p.total_ = p.offsets_.back();
  p.sizes_ = std::move(sizes);
  return p;
}

Partition Partition::from_sizes_perm(std::vector<std::size_t> sizes,
                                     std::vector<std::size_t> perm) {
  Partition p = from_sizes(std::move(sizes));
  if (perm.size() != p.total_)
    throw std::invalid_argument("Partition: permutation length mismatch");
  std::vector<bool> seen(p.total_, false);
  for (std::size_t k : perm) {
    if (k >= p.total_ || seen[k])
      throw std::invalid_argument("Partition: perm is not a permutation of [0,d)");
    seen[k] = true;
  }
  // An identity permutation is dropped so the common case stays slice-based.
  bool identity = true;
  for (std::size_t k = 0; k < perm.size(); ++k)
    if (perm[k] != k) {
      identity = false;
      break;
    }
  if (!identity) p.perm_ = std::move(perm);
  return p;
}

std::size_t Partition::max_group_size() const {
  return *std::max_element(sizes_.begin(), sizes_.end());
}

Partition partition_chunk(std::size_t d, std::size_t k) {
  if (d == 0) throw std::invalid_argument("partition_chunk: d must be >= 1");
  if (k == 0) throw std::invalid_argument("partition_chunk: k must be >= 1");
  std::vector<std::size_t> sizes;
  sizes.reserve((d + k - 1) / k);
  for (std::size_t off = 0; off < d; off += k) sizes.push_back(std::min(k, d - off));
  return Partition::from_sizes(std::move(sizes));
}

std::size_t TensorInfo::size() const {
  std::size_t s = 1;
  for (std::size_t e : shape) s *= e;
  return s;
}

TensorLayout TensorLayout::from_shapes(
    const std::vector<std::pair<std::string, std::vector<std::size_t>>>& shapes) {
  TensorLayout layout;
  std::size_t off = 0;
  for (const auto& [name, shape] : shapes) {
    if (shape.empty()) throw std::invalid_argument("TensorLayout: rank-0 tensor " + name);
    for (std::size_t e : shape)
      if (e == 0) throw std::invalid_argument("TensorLayout: zero extent in " + name);
    TensorInfo info{name, shape, off};
    off += info.size();
    layout.tensors_.push_back(std::move(info));
  }
  layout.total_ = off;
  if (layout.total_ == 0) throw std::invalid_argument("TensorLayout: empty layout");
  return layout;
}

const std::string& TensorLayout::name_at(std::size_t flat_index) const {
  for (const auto& t : tensors_)
    if (flat_index >= t.offset && flat_index < t.offset + t.size()) return t.name;
  throw std::invalid_argument("TensorLayout: flat index out of range");
}

namespace {

// Splits one candidate group (a list of flat indices) into runs of at most
// max_block, appending sizes and permutation entries.
void chunk_candidate(const std::vector<std::size_t>& candidate, std::size_t max_block,
                     std::vector<std::size_t>& sizes, std::vector<std::size_t>& perm) {
  for (std::size_t off = 0; off < candidate.size(); off += max_block) {
    const std::size_t len = std::min(max_block, candidate.size() - off);
    sizes.push_back(len);
    for (std::size_t i = 0; i < len; ++i) perm.push_back(candidate[off + i]);
  }
}

}  // namespace

Partition partition_input_neuron(const TensorLayout& layout, std::size_t max_block) {
  if (max_block == 0)
    throw std::invalid_argument("partition_input_neuron: max_block must be >= 1");
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> perm;
  perm.reserve(layout.total());
  for (const auto& t : layout.tensors()) {
    if (t.shape.size() == 1) {
      std::vector<std::size_t> candidate(t.size());
      std::iota(candidate.begin(), candidate.end(), t.offset);
      chunk_candidate(candidate, max_block, sizes, perm);
    } else if (t.shape.size() == 2) {
      const std::size_t out = t.shape[0];
      const std::size_t in = t.shape[1];
      for (std::size_t j = 0; j < in; ++j) {
        std::vector<std::size_t> candidate(out);
        for (std::size_t i = 0; i < out; ++i) candidate[i] = t.offset + i * in + j;
        chunk_candidate(candidate, max_block, sizes, perm);
      }
    } else {
      throw std::invalid_argument("partition_input_neuron: unsupported rank " +
                                  std::to_string(t.shape.size()) + " for tensor " +
                                  t.name + " (use partition_leading_axis)");
    }
  }
  return Partition::from_sizes_perm(std::move(sizes), std::move(perm));
}

Partition partition_leading_axis(const TensorLayout& layout, std::size_t max_block) {
  if (max_block == 0)
    throw std::invalid_argument("partition_leading_axis: max_block must be >= 1");
  std::vector<std::size_t> sizes;
  for (const auto& t : layout.tensors()) {
    const std::size_t slice = t.size() / t.shape[0];
    for (std::size_t a = 0; a < t.shape[0]; ++a)
      for (std::size_t off = 0; off < slice; off += max_block)
        sizes.push_back(std::min(max_block, slice - off));
  }
  return Partition::from_sizes(std::move(sizes));
}

std::vector<double> gather_block(std::span<const double> g, const Partition& p,
                                 std::size_t j) {
  if (g.size() != p.total())
    throw std::invalid_argument("gather_block: vector length does not match partition");
  if (j >= p.group_count())
    throw std::invalid_argument("gather_block: group index out of range");
  std::vector<double> out(p.group_size(j));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[p.flat_index(j, i)];
  return out;
}

}  // namespace blockadapt::grouping
