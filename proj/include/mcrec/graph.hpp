// Copyright 2026 The mcrec Authors
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
#include <vector>

#include "mcrec/dataset.hpp"

namespace mcrec {

// Node layout of the expansion graph: user nodes first, then one block of
// item nodes per criterion. Node of (item i, criterion c) sits at
// n_users + c * n_items + i.
struct GraphLayout {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  std::uint32_t n_criteria_plus1 = 1;

  std::uint64_t node_count() const {
    return static_cast<std::uint64_t>(n_users) +
           static_cast<std::uint64_t>(n_criteria_plus1) * n_items;
  }
  std::uint32_t criterion_item_node(std::uint32_t item, std::uint32_t criterion) const {
    return n_users + criterion * n_items + item;
  }
  bool is_user(std::uint64_t v) const { return v < n_users; }
  std::uint32_t node_criterion(std::uint64_t v) const {
    return static_cast<std::uint32_t>((v - n_users) / n_items);
  }
  std::uint32_t node_item(std::uint64_t v) const {
    return static_cast<std::uint32_t>((v - n_users) % n_items);
  }
};

// Weighted bipartite expansion graph: one edge per positive (u, i, c).
struct McExpansionGraph {
  GraphLayout layout;
  std::vector<std::uint32_t> edge_user;    // user node index
  std::vector<std::uint32_t> edge_node;    // criterion-item node index
  std::vector<double> edge_weight;
  std::vector<double> weighted_degree;     // size layout.node_count()

  std::size_t n_edges() const { return edge_user.size(); }
};

// Symmetric degree-normalized adjacency in CSR form over all nodes.
// coef(u, v) = w_uv / sqrt(wdeg(u) * wdeg(v)); rows of isolated nodes are empty.
struct NormalizedAdjacency {
  std::uint64_t n_nodes = 0;
  std::vector<std::uint64_t> row_ptr;  // size n_nodes + 1
  std::vector<std::uint32_t> col;
  std::vector<double> coef;
};

struct BuildGraphOptions {
  double alpha = 1.5;             // weight of overall-criterion edges
  std::uint32_t n_criteria_use = 0;  // 0 = all declared criteria
  bool use_rating_weights = false;   // per-edge weights from InteractionSet
};

// Build the expansion graph from train positives. Edge weight is alpha for
// criterion 0 and 1 otherwise (or the interaction weight when enabled, still
// scaled by alpha on criterion 0). Criterion-item nodes without positives are
// kept in the index space with degree zero.
McExpansionGraph build_graph(const InteractionSet& train, const BuildGraphOptions& opts);

NormalizedAdjacency normalize(const McExpansionGraph& g);

// Edge-list TSV export (src, dst, weight) plus a small JSON header file.
void export_graph(const McExpansionGraph& g, const std::filesystem::path& edges_tsv,
                  const std::filesystem::path& header_json);

// Per-user sorted neighbor lists (criterion-item node ids), for sampling.
std::vector<std::vector<std::uint32_t>> user_adjacency(const McExpansionGraph& g);

}  // namespace mcrec
