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
#include <vector>

#include "mcrec/graph.hpp"
#include "mcrec/kernels.hpp"
#include "mcrec/matrix.hpp"

namespace mcrec {

// Trainable state. e0 holds one row per node (users then criterion-item
// blocks). The preference family has trainable per-user rows and one fixed
// prototype row per criterion; criterion-item nodes of one criterion all
// start from their criterion's prototype.
struct EmbeddingState {
  Matrix e0;        // node_count x d
  Matrix p0_user;   // n_users x d, empty when has_p == false
  Matrix p0_proto;  // n_criteria_plus1 x d, fixed after init
  std::uint32_t dim = 0;
  bool has_p = true;
};

// Xavier-uniform init with bound sqrt(6 / (d + d)). The prototype table is
// drawn from a separate stream so prototypes stay mutually distinct and E/P
// draws do not depend on each other's presence.
EmbeddingState init_embeddings(const GraphLayout& layout, std::uint32_t d,
                               std::uint64_t seed, bool with_p);

// Assemble the full |V| x d layer-0 preference table from user rows and
// criterion prototypes.
Matrix assemble_p0(const EmbeddingState& state, const GraphLayout& layout);

struct ForwardTrace;

struct ForwardOptions {
  std::uint32_t layers = 3;
  double scale = 1.0;            // pairnorm scale s
  bool pairnorm = true;
  bool pairnorm_layer0 = true;   // apply f before the first propagation
  bool keep_layers = true;       // keep per-layer tables (exact backward needs them)
  bool strict_degenerate = false;  // throw on degenerate pairnorm input
  // Test hook: take the detached preference rows (criterion-item rows of
  // every normalized P table) from a reference trace instead of recomputing
  // them. This makes finite differences of the forward loss agree with the
  // stop-gradient backward.
  const ForwardTrace* freeze_p_from = nullptr;
};

struct ForwardTrace {
  GraphLayout layout;
  ForwardOptions opts;
  bool has_p = false;

  // Post-normalization tables per layer (l = 0..L), kept when keep_layers.
  std::vector<Matrix> e_layers;
  std::vector<Matrix> p_layers;
  std::vector<kernels::PairNormStats> e_stats;
  std::vector<kernels::PairNormStats> p_stats;

  // Combined tables: mean over layers, then one more f.
  Matrix e_comb;
  Matrix p_comb;
  kernels::PairNormStats e_comb_stats;
  kernels::PairNormStats p_comb_stats;

  // Final representation: e_comb + p_comb (or e_comb alone without the
  // preference stack).
  Matrix final_z;
};

// Dual-stack propagation: E and P tables go through the same
// propagate -> normalize chain, are averaged over layers 0..L with uniform
// weight 1/(L+1), normalized once more, and summed into the final table.
ForwardTrace forward(const NormalizedAdjacency& adj, const GraphLayout& layout,
                     const EmbeddingState& state, const ForwardOptions& opts);

// Matching score of user u and criterion-item node (i, c).
double predict(const ForwardTrace& trace, std::uint32_t u, std::uint32_t item,
               std::uint32_t criterion);

// Scores of user u against every item's criterion-0 node.
std::vector<double> score_all_items(const ForwardTrace& trace, std::uint32_t u);
std::vector<double> score_all_items(const Matrix& final_z, const GraphLayout& layout,
                                    std::uint32_t u);

}  // namespace mcrec
