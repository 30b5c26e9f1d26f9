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
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "mcrec/dataset.hpp"
#include "mcrec/matrix.hpp"
#include "mcrec/model.hpp"

namespace mcrec {

struct PerUserMetrics {
  std::uint32_t user = 0;
  std::map<std::uint32_t, double> precision;
  std::map<std::uint32_t, double> recall;
  std::map<std::uint32_t, double> ndcg;
};

struct RankingMetrics {
  std::map<std::uint32_t, double> precision;  // K -> mean over evaluated users
  std::map<std::uint32_t, double> recall;
  std::map<std::uint32_t, double> ndcg;
  std::uint64_t n_users_evaluated = 0;
  std::vector<PerUserMetrics> per_user;  // filled on request
};

struct EvalOptions {
  std::vector<std::uint32_t> k_values{5, 10};
  bool per_user_detail = false;
};

// Scores a user against the full item catalog (criterion 0). Must be safe to
// call concurrently; per-user ranking fans out across threads.
using ItemScorer = std::function<std::vector<double>(std::uint32_t user)>;

// Top-K ranking protocol: per user the candidate set is every item minus the
// user's criterion-0 positives in the exclusion sets; candidates are ranked
// by score descending with ties broken by ascending item index. Hits are the
// user's criterion-0 test items. NDCG uses binary relevance with the ideal
// DCG over min(K, |test_u|). Users without test positives are skipped;
// throws if no user is evaluable.
RankingMetrics rank_and_score(const ItemScorer& scorer, std::uint32_t n_users,
                              std::uint32_t n_items, const InteractionSet& exclude_train,
                              const InteractionSet* exclude_also, const InteractionSet& test,
                              const EvalOptions& opts);

// Convenience wrapper scoring from a completed forward pass.
RankingMetrics rank_and_score(const ForwardTrace& trace, const InteractionSet& exclude_train,
                              const InteractionSet* exclude_also, const InteractionSet& test,
                              const EvalOptions& opts);

// --- smoothness diagnostics -------------------------------------------------

struct SmoothnessReport {
  // Per layer l = 0..L: mean Euclidean distance over sampled node pairs.
  std::vector<double> mean_distance;
  // Per layer: histogram of pairwise distances.
  std::vector<std::vector<std::uint64_t>> histograms;
  std::vector<double> bin_edges;  // size bins + 1
  std::uint64_t sampled_nodes = 0;
};

struct SmoothnessOptions {
  std::uint64_t max_nodes = 2000;  // exact below, sampled above
  std::uint32_t bins = 50;
  double hist_max = 0.0;  // 0 = derive from the data
  std::uint64_t seed = 0;
};

// Mean pairwise distances of the per-layer representations of a trace
// produced with keep_layers = true. Uses the combined (E + P) family when
// the preference stack exists, otherwise the E family alone.
SmoothnessReport smoothness_report(const ForwardTrace& trace, const SmoothnessOptions& opts);

// Mean over ordered pairs (diagonal included) of squared distances,
// (1/n^2) * sum_ij ||x_i - x_j||^2; equals 2 * s^2 after the normalizer.
double mean_pairwise_sq_distance(const Matrix& x);

void save_smoothness_csv(const SmoothnessReport& rep, const std::filesystem::path& means_csv,
                         const std::filesystem::path& hist_csv);

// --- planted synthetic data --------------------------------------------------

struct SyntheticOptions {
  std::uint32_t n_users = 2000;
  std::uint32_t n_items = 500;
  std::uint32_t n_criteria = 3;  // C, excluding overall
  double density = 0.03;         // fraction of the catalog each user rates
  double noise = 0.3;            // std of the noise added to overall ratings
  double rate_prob = 1.0;        // probability a side criterion gets rated
  std::uint64_t seed = 0;
};

// Planted-preference generator. Every item has a dominant criterion with a
// high latent quality; every user cares mostly about one criterion. Side
// criterion ratings reflect item quality amplified by the user's interest,
// while the overall rating is the preference-weighted quality blend plus
// noise. Side ratings therefore carry signal about the user's preferences
// beyond what the noisy overall ratings expose.
RatingLog generate_synthetic(const SyntheticOptions& opts);
std::vector<CriterionSpec> synthetic_specs(std::uint32_t n_criteria);

}  // namespace mcrec
