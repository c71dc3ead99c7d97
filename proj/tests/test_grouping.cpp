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

#include <numeric>

#include <gtest/gtest.h>

namespace blockadapt::grouping {
namespace {

std::vector<std::size_t> sizes_of(const Partition& p) {
  return {p.sizes().begin(), p.sizes().end()};
}

TEST(PartitionChunk, ExactDivision) {
  const Partition p = partition_chunk(6, 2);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{2, 2, 2}));
  EXPECT_EQ(p.total(), 6u);
}

TEST(PartitionChunk, Remainder) {
  const Partition p = partition_chunk(7, 3);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{3, 3, 1}));
}

TEST(PartitionChunk, DegenerateRegimes) {
  EXPECT_EQ(partition_chunk(9, 1).group_count(), 9u);   // diagonal regime
  EXPECT_EQ(partition_chunk(9, 9).group_count(), 1u);   // full-matrix regime
  EXPECT_EQ(partition_chunk(9, 100).group_count(), 1u);
}

TEST(PartitionChunk, RejectsZeroArguments) {
  EXPECT_THROW(partition_chunk(0, 2), std::invalid_argument);
  EXPECT_THROW(partition_chunk(6, 0), std::invalid_argument);
}

TEST(PartitionFromSizes, ExplicitValidationPath) {
  const Partition p = Partition::from_sizes({2, 3, 1});
  EXPECT_EQ(p.total(), 6u);
  EXPECT_EQ(p.group_offset(1), 2u);
  EXPECT_EQ(p.group_offset(2), 5u);
  EXPECT_THROW(Partition::from_sizes({2, 0, 1}), std::invalid_argument);
  EXPECT_THROW(Partition::from_sizes({}), std::invalid_argument);
}

TEST(PartitionFromSizes, PermValidation) {
  EXPECT_NO_THROW(Partition::from_sizes_perm({2, 1}, {2, 0, 1}));
  EXPECT_THROW(Partition::from_sizes_perm({2, 1}, {0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(Partition::from_sizes_perm({2, 1}, {0, 1}), std::invalid_argument);
  // Identity permutations are normalized away.
  EXPECT_FALSE(Partition::from_sizes_perm({2, 1}, {0, 1, 2}).has_perm());
}

TEST(GatherBlock, GroupingExample) {
  const std::vector<double> g = {1, 2, 3, 4, 5, 6};
  const Partition p = Partition::from_sizes({2, 3, 1});
  EXPECT_EQ(gather_block(g, p, 0), (std::vector<double>{1, 2}));
  EXPECT_EQ(gather_block(g, p, 1), (std::vector<double>{3, 4, 5}));
  EXPECT_EQ(gather_block(g, p, 2), (std::vector<double>{6}));
  EXPECT_THROW(gather_block(g, p, 3), std::invalid_argument);
}

TEST(GatherBlock, ConcatenationReproducesInput) {
  const std::vector<double> g = {1, 2, 3, 4, 5, 6, 7};
  for (const Partition& p :
       {partition_chunk(7, 3), Partition::from_sizes_perm(
                                   {4, 3}, {6, 4, 2, 0, 1, 3, 5})}) {
    std::vector<bool> seen(7, false);
    std::vector<double> collected;
    for (std::size_t j = 0; j < p.group_count(); ++j)
      for (double v : gather_block(g, p, j)) collected.push_back(v);
    ASSERT_EQ(collected.size(), g.size());
    for (double v : collected) {
      const auto idx = static_cast<std::size_t>(v - 1);
      EXPECT_FALSE(seen[idx]);
      seen[idx] = true;
    }
  }
}

TEST(TensorLayout, TilesWithoutOverlap) {
  const TensorLayout layout =
      TensorLayout::from_shapes({{"W1", {3, 2}}, {"b1", {3}}, {"W2", {1, 3}}});
  EXPECT_EQ(layout.total(), 12u);
  EXPECT_EQ(layout.name_at(0), "W1");
  EXPECT_EQ(layout.name_at(6), "b1");
  EXPECT_EQ(layout.name_at(11), "W2");
  EXPECT_THROW(layout.name_at(12), std::invalid_argument);
}

TEST(PartitionInputNeuron, OneGroupPerColumn) {
  // 3x2 weight matrix: coordinates of input neuron j are {j, 2+j, 4+j}.
  const TensorLayout layout = TensorLayout::from_shapes({{"W1", {3, 2}}});
  const Partition p = partition_input_neuron(layout, 3);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{3, 3}));
  const std::vector<double> g = {0, 1, 2, 3, 4, 5};
  EXPECT_EQ(gather_block(g, p, 0), (std::vector<double>{0, 2, 4}));
  EXPECT_EQ(gather_block(g, p, 1), (std::vector<double>{1, 3, 5}));
}

TEST(PartitionInputNeuron, ChunksColumns) {
  const TensorLayout layout = TensorLayout::from_shapes({{"W1", {3, 2}}});
  const Partition p = partition_input_neuron(layout, 2);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{2, 1, 2, 1}));
}

TEST(PartitionInputNeuron, BiasChunkedDirectly) {
  const TensorLayout layout = TensorLayout::from_shapes({{"b1", {5}}});
  const Partition p = partition_input_neuron(layout, 10);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{5}));
}

TEST(PartitionInputNeuron, RejectsHighRank) {
  const TensorLayout layout = TensorLayout::from_shapes({{"K", {2, 3, 3}}});
  EXPECT_THROW(partition_input_neuron(layout, 4), std::invalid_argument);
}

TEST(PartitionLeadingAxis, RowsOfMatrix) {
  const TensorLayout layout = TensorLayout::from_shapes({{"W", {4, 3}}});
  const Partition p = partition_leading_axis(layout, 8);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{3, 3, 3, 3}));
  EXPECT_FALSE(p.has_perm());
}

TEST(PartitionLeadingAxis, FilterSlices) {
  const TensorLayout layout = TensorLayout::from_shapes({{"K", {2, 3, 3}}});
  const Partition p = partition_leading_axis(layout, 9);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{9, 9}));
}

TEST(PartitionLeadingAxis, ChunksSlices) {
  const TensorLayout layout = TensorLayout::from_shapes({{"W", {2, 5}}});
  const Partition p = partition_leading_axis(layout, 3);
  EXPECT_EQ(sizes_of(p), (std::vector<std::size_t>{3, 2, 3, 2}));
}

TEST(LayoutStrategies, GroupsNeverSpanTensors) {
  const TensorLayout layout =
      TensorLayout::from_shapes({{"W1", {3, 4}}, {"b1", {3}}, {"W2", {2, 3}}, {"b2", {2}}});
  for (const Partition& p :
       {partition_input_neuron(layout, 2), partition_leading_axis(layout, 2)}) {
    EXPECT_EQ(p.total(), layout.total());
    for (std::size_t j = 0; j < p.group_count(); ++j) {
      const std::string& owner = layout.name_at(p.flat_index(j, 0));
      for (std::size_t i = 1; i < p.group_size(j); ++i)
        EXPECT_EQ(layout.name_at(p.flat_index(j, i)), owner);
    }
  }
}

}  // namespace
}  // namespace blockadapt::grouping
