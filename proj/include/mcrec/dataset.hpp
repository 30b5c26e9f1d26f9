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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mcrec {

// How a raw rating value turns into a positive interaction.
enum class PositiveRule {
  MedianOfRange,   // value >= (scale_min + scale_max) / 2
  AtLeastOne,      // value >= 1 (vote counts)
  FixedThreshold,  // value >= threshold
};

struct CriterionSpec {
  std::uint32_t criterion = 0;  // 0 is the overall criterion
  std::string name;
  double scale_min = 1.0;
  double scale_max = 5.0;
  PositiveRule rule = PositiveRule::MedianOfRange;
  double threshold = 0.0;  // used by FixedThreshold only

  double positive_cutoff() const;
  void validate() const;
};

struct RatingRecord {
  std::string user_id;
  std::string item_id;
  std::uint32_t criterion = 0;
  double value = 0.0;
};

struct RatingLog {
  std::vector<RatingRecord> records;
  std::uint32_t n_criteria_plus1 = 1;  // C + 1, criterion 0 included
};

struct DatasetStats {
  std::uint64_t n_users = 0;
  std::uint64_t n_items = 0;
  std::uint64_t n_overall_ratings = 0;
  std::uint64_t n_mc_ratings = 0;  // all criteria, overall included
  std::uint32_t n_criteria = 0;    // C, excluding overall
  double gamma = 0.0;              // n_mc_ratings / n_overall_ratings
};

// Binarized interactions over dense user/item indices.
// positives[c] is the sorted, deduplicated list of (user, item) pairs that
// are positive on criterion c.
struct InteractionSet {
  std::vector<std::string> users;  // dense index -> id
  std::vector<std::string> items;
  std::unordered_map<std::string, std::uint32_t> user_index;
  std::unordered_map<std::string, std::uint32_t> item_index;
  std::uint32_t n_criteria_plus1 = 1;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> positives;
  // Optional per-positive weight, parallel to positives.
  std::optional<std::vector<std::vector<double>>> weights;

  std::uint32_t n_users() const { return static_cast<std::uint32_t>(users.size()); }
  std::uint32_t n_items() const { return static_cast<std::uint32_t>(items.size()); }
  std::uint64_t total_positives() const;
  void validate() const;
};

// --- criterion specs ------------------------------------------------------

std::vector<CriterionSpec> load_criterion_specs(const std::filesystem::path& path);
void save_criterion_specs(const std::vector<CriterionSpec>& specs,
                          const std::filesystem::path& path);
std::vector<CriterionSpec> default_specs(std::uint32_t n_criteria_plus1,
                                         double scale_min = 1.0, double scale_max = 5.0);

// --- operations -----------------------------------------------------------

// Parse a whitespace-separated rating file: user item criterion value.
// Lines starting with '#' and blank lines are skipped. Throws on malformed
// lines (with the line number) and on out-of-scale values.
RatingLog ingest(const std::filesystem::path& path, const std::vector<CriterionSpec>& specs);
RatingLog ingest_records(std::vector<RatingRecord> records,
                         const std::vector<CriterionSpec>& specs);

// Per-criterion record counts of a log (index c -> count).
std::vector<std::uint64_t> records_per_criterion(const RatingLog& log);

// Apply each criterion's positive rule. Users/items are indexed densely in
// first-appearance order of the log.
InteractionSet binarize(const RatingLog& log, const std::vector<CriterionSpec>& specs);

// Same, but against a fixed vocabulary (records referencing unknown ids throw).
InteractionSet binarize_with_vocab(const RatingLog& log,
                                   const std::vector<CriterionSpec>& specs,
                                   const std::vector<std::string>& users,
                                   const std::vector<std::string>& items);

// Iteratively drop users/items with fewer than k overall positives until a
// fixed point, then reindex densely. Throws if nothing survives.
InteractionSet filter_min_interactions(const InteractionSet& iset, std::uint32_t k);

struct SplitRatios {
  double train = 0.7;
  double valid = 0.1;
  double test = 0.2;
};

struct SplitResult {
  InteractionSet train;
  InteractionSet valid;
  InteractionSet test;
};

// Per-user random partition of overall positives. Valid/test sizes use
// floor(ratio * n), the remainder stays in train. Non-overall positives are
// kept (in train) only when their (u, i) pair's overall positive landed in
// train; everything else is dropped so no side-criterion signal about held
// out pairs reaches training.
SplitResult split(const InteractionSet& iset, const SplitRatios& ratios, std::uint64_t seed);

// Rating-count statistics of a log. Throws when there are no overall records.
DatasetStats log_stats(const RatingLog& log);

// Interaction-count statistics of a binarized set (positives per criterion).
// Throws when criterion 0 has no positives.
DatasetStats stats(const InteractionSet& iset);

// --- split artifacts on disk ----------------------------------------------

// A split is stored as three positive-record TSV files plus a vocabulary, so
// every stage of the pipeline shares one dense index space.
void save_interactions_tsv(const InteractionSet& iset, const std::filesystem::path& path);
InteractionSet load_interactions_tsv(const std::filesystem::path& path,
                                     const std::vector<std::string>& users,
                                     const std::vector<std::string>& items,
                                     std::uint32_t n_criteria_plus1);
void save_vocab(const InteractionSet& iset, const std::filesystem::path& path);
void load_vocab(const std::filesystem::path& path, std::vector<std::string>& users,
                std::vector<std::string>& items, std::uint32_t& n_criteria_plus1);

void save_rating_log_tsv(const RatingLog& log, const std::filesystem::path& path);

}  // namespace mcrec
