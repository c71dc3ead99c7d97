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

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blockadapt::grouping {

// Ordered split of a length-d flat vector into contiguous groups.
//
// Layout-aware strategies may carry a permutation: position k of the
// grouped ordering reads flat index perm[k]. An empty perm means identity,
// in which case every group is a contiguous slice of the flat vector.
class Partition {
 public:
  Partition() = default;

  static Partition from_sizes(std::vector<std::size_t> sizes);
  static Partition from_sizes_perm(std::vector<std::size_t> sizes,
                                   std::vector<std::size_t> perm);

  std::size_t total() const { return total_; }
  std::size_t group_count() const { return sizes_.size(); }
  std::size_t group_size(std::size_t j) const { return sizes_[j]; }
  std::size_t group_offset(std::size_t j) const { return offsets_[j]; }
  std::span<const std::size_t> sizes() const { return sizes_; }
  std::span<const std::size_t> offsets() const { return offsets_; }

  bool has_perm() const { return !perm_.empty(); }
  std::span<const std::size_t> perm() const { return perm_; }

  // Flat index backing element i of group j.
  std::size_t flat_index(std::size_t j, std::size_t i) const {
    const std::size_t k = offsets_[j] + i;
    return perm_.empty() ? k : perm_[k];
  }

  std::size_t max_group_size() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // size r+1; offsets_[r] == total_
  std::vector<std::size_t> perm_;     // empty == identity
  std::size_t total_ = 0;
};

// ceil(d/k) groups of size k, with a trailing remainder group of size
// d mod k when k does not divide d.
Partition partition_chunk(std::size_t d, std::size_t k);

// Shape metadata for the parameter tensors tiling a flat vector.
struct TensorInfo {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;

  std::size_t size() const;
};

class TensorLayout {
 public:
  TensorLayout() = default;

  // Assigns offsets sequentially in declaration order (row-major tensors).
  static TensorLayout from_shapes(
      const std::vector<std::pair<std::string, std::vector<std::size_t>>>& shapes);

  std::size_t total() const { return total_; }
  const std::vector<TensorInfo>& tensors() const { return tensors_; }

  // Name of the tensor owning a flat index (for error messages).
  const std::string& name_at(std::size_t flat_index) const;

  bool operator==(const TensorLayout&) const = default;

 private:
  std::vector<TensorInfo> tensors_;
  std::size_t total_ = 0;
};

// Groups the coordinates of each 2-D (out, in) weight matrix by input
// neuron (column-wise), chunking each column to at most max_block; 1-D
// tensors are chunked directly. Groups never span tensors. Tensors of
// rank > 2 are rejected (use partition_leading_axis for those).
Partition partition_input_neuron(const TensorLayout& layout, std::size_t max_block);

// One candidate group per leading-axis slice of each tensor, chunked to at
// most max_block. Works for any rank; on 2-D weight matrices this groups
// by output unit. Groups never span tensors.
Partition partition_leading_axis(const TensorLayout& layout, std::size_t max_block);

// The slice of g backing group j (through the permutation when present).
std::vector<double> gather_block(std::span<const double> g, const Partition& p,
                                 std::size_t j);

}  // namespace blockadapt::grouping
