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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcrec/graph.hpp"
#include "mcrec/model.hpp"
#include "mcrec/rng.hpp"

namespace mcrec {

// Ablation switches. The named variants map onto these flags and compose:
//   full    = {true, true, true}            "CPA-LGC"
//   mc_only = expansion graph off           "CPA-LGC-MC"
//   no_cp   = preference stack off          "CPA-LGC-c"
//   no_f    = normalization off             "CPA-LGC-f"
struct VariantFlags {
  bool mc_graph = true;  // false: build the graph from overall ratings only
  bool cp = true;        // false: drop the preference (UCP/IC) stack
  bool f = true;         // false: no layer-wise normalization
};

VariantFlags parse_variant(const std::string& text);
std::string variant_name(const VariantFlags& v);   // "full", "mc_only+no_cp", ...
std::string variant_label(const VariantFlags& v);  // "CPA-LGC", "CPA-LGC-MC", ...

enum class NegSampling {
  AllCriteria,  // negatives over every criterion-item node not adjacent to u
  OverallOnly,  // negatives restricted to the criterion-0 block
};

struct TrainConfig {
  std::uint32_t layers = 3;
  std::uint32_t dim = 64;
  double lr = 1e-3;
  double lambda = 1e-3;
  double alpha = 1.5;
  double scale = 1.0;  // pairnorm scale s
  bool pairnorm = true;
  bool pairnorm_layer0 = true;
  std::uint32_t batch_size = 1024;
  std::uint32_t max_epochs = 100;
  std::uint32_t patience = 10;
  std::uint64_t seed = 0;
  VariantFlags variant;
  NegSampling neg_sampling = NegSampling::AllCriteria;
  std::uint32_t threads = 0;  // 0 = library default
  bool use_rating_weights = false;

  void validate() const;
};

nlohmann::json train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct BprTriple {
  std::uint32_t user = 0;
  std::uint32_t pos_node = 0;  // criterion-item node adjacent to user
  std::uint32_t neg_node = 0;  // criterion-item node not adjacent to user
};

// One triple per sampled positive edge (so users are drawn proportionally to
// their edge count); the negative is rejection-sampled uniformly over
// criterion-item nodes not adjacent to the user. A user adjacent to every
// candidate node is skipped with a warning.
std::vector<BprTriple> sample_batch(const McExpansionGraph& g,
                                    const std::vector<std::vector<std::uint32_t>>& user_adj,
                                    std::uint32_t batch_size, NegSampling mode, Rng& rng);

// sum_k softplus(neg_k - pos_k) + lambda * reg_norm_sq
double bpr_loss(std::span<const double> pos, std::span<const double> neg,
                double reg_norm_sq, double lambda);

// Scores of a batch against a completed forward pass.
void batch_scores(const ForwardTrace& trace, const std::vector<BprTriple>& batch,
                  std::vector<double>& pos, std::vector<double>& neg);

// lambda * sum of squared layer-0 rows over the distinct users/nodes of the
// batch (preference rows included for users).
double reg_norm_sq(const EmbeddingState& state, const GraphLayout& layout,
                   const std::vector<BprTriple>& batch);

struct Gradients {
  Matrix e0;
  Matrix p0_user;   // empty when the state has no preference stack
  Matrix p0_proto;  // always zero: prototypes are fixed
};

// Exact reverse-mode gradient of the batch BPR objective w.r.t. the
// trainable tables, under the stop-gradient convention for the preference
// stack (criterion-item preference rows are constants, so preference
// gradients flow only through the layer-0 user rows). The trace must be
// produced with keep_layers = true.
Gradients backward(const NormalizedAdjacency& adj, const EmbeddingState& state,
                   const ForwardTrace& trace, const std::vector<BprTriple>& batch,
                   double lambda);

struct AdamState {
  Matrix m;
  Matrix v;
};

// Standard Adam update with bias correction, full table.
void adam_step(Matrix& params, const Matrix& grads, AdamState& st, double lr, double beta1,
               double beta2, double eps, std::uint64_t t);

// Lazy per-row variant for sparse batch gradients.
void adam_step_row(Matrix& params, std::uint32_t row, std::span<const double> grad,
                   AdamState& st, double lr, double beta1, double beta2, double eps,
                   std::uint64_t t);

struct TrainLogRow {
  std::uint32_t epoch = 0;
  double loss = 0.0;       // epoch mean per-triple loss
  double val_ndcg10 = 0.0; // NaN when no validation split
  double seconds = 0.0;    // training part of the epoch
};

struct TrainResult {
  EmbeddingState state;  // best-validation state (last state without validation)
  GraphLayout layout;
  McExpansionGraph graph;
  NormalizedAdjacency adj;
  std::vector<TrainLogRow> log;
  std::uint32_t best_epoch = 0;
  double best_val_ndcg10 = 0.0;
  bool aborted_non_finite = false;
};

// Full training pipeline: build the (variant-dependent) graph from the train
// split, initialize embeddings, run epochs of mini-batches with lazy Adam,
// evaluate NDCG@10 on the validation split after each epoch, keep the best
// state, and stop after `patience + 1` consecutive epochs without
// improvement.
//
// Inside an epoch the propagated context is refreshed once and held fixed;
// each mini-batch updates the layer-0 rows it touched through the layer
// combination term. This keeps one epoch at O(L * d * (|V| + |E|)) while
// still applying ceil(|E| / batch_size) optimizer steps per epoch. The exact
// full-graph gradient stays available through backward().
TrainResult train(const InteractionSet& train_set, const InteractionSet& valid_set,
                  const TrainConfig& config);

void save_train_log(const std::vector<TrainLogRow>& rows, const std::filesystem::path& path);

}  // namespace mcrec
