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

#include <string>
#include <vector>

#include "mcrec/evaluation.hpp"
#include "mcrec/training.hpp"

namespace mcrec {

enum class BaselineKind { LightGcn, LightGcnMc };

BaselineKind baseline_kind_from_string(const std::string& s);
std::string baseline_kind_name(BaselineKind k);

// Plain light graph convolution on the overall-rating bipartite graph:
// identical propagation/combination machinery with the preference stack and
// the normalizer disabled.
ForwardTrace lightgcn_forward(const NormalizedAdjacency& adj, const GraphLayout& layout,
                              const EmbeddingState& state, std::uint32_t layers);

// Training delegate: CPA-LGC restricted to {overall graph, no preference
// stack, no normalizer}, so comparisons cannot pick up implementation skew.
TrainResult train_lightgcn(const InteractionSet& train_set, const InteractionSet& valid_set,
                           const TrainConfig& config);

// One light graph convolution per criterion graph; the final user/item
// representation is the concatenation over criteria and the score is the dot
// product of the concatenated vectors.
struct LightGcnMcModel {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  std::uint32_t n_criteria_plus1 = 1;
  std::uint32_t dim = 0;
  std::uint32_t layers = 1;
  std::vector<Matrix> e0;                    // one (|U|+|I|) x d table per criterion
  std::vector<McExpansionGraph> graphs;      // per-criterion bipartite graphs
  std::vector<NormalizedAdjacency> adjs;
};

LightGcnMcModel init_lightgcn_mc(const InteractionSet& train_set, const TrainConfig& config);

// Per-segment combined tables ((|U|+|I|) x d each).
std::vector<Matrix> lightgcn_mc_forward(const LightGcnMcModel& model);

// Sum over segments of the user/item dot products (equivalent to the dot
// product of concatenated representations).
double lightgcn_mc_score(const std::vector<Matrix>& segments, std::uint32_t n_users,
                         std::uint32_t user, std::uint32_t item);
std::vector<double> lightgcn_mc_score_all(const std::vector<Matrix>& segments,
                                          std::uint32_t n_users, std::uint32_t n_items,
                                          std::uint32_t user);

struct LightGcnMcTrainResult {
  LightGcnMcModel model;
  std::vector<TrainLogRow> log;
  std::uint32_t best_epoch = 0;
  double best_val_ndcg10 = 0.0;
};

// Joint training of all segments under one pairwise loss over the summed
// scores. Positives and negatives are overall-rating interactions.
LightGcnMcTrainResult train_lightgcn_mc(const InteractionSet& train_set,
                                        const InteractionSet& valid_set,
                                        const TrainConfig& config);

}  // namespace mcrec
