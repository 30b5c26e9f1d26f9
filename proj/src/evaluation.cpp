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

#include "mcrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mcrec/kernels.hpp"
#include "mcrec/rng.hpp"

namespace mcrec {

namespace {

std::vector<std::vector<std::uint32_t>> items_by_user(const InteractionSet& iset,
                                                      std::uint32_t n_users) {
  std::vector<std::vector<std::uint32_t>> out(n_users);
  if (!iset.positives.empty())
    for (const auto& [u, i] : iset.positives[0])
      if (u < n_users) out[u].push_back(i);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

double ideal_dcg(std::uint32_t k, std::size_t n_test) {
  const std::uint32_t slots = std::min<std::uint64_t>(k, n_test);
  double acc = 0.0;
  for (std::uint32_t r = 1; r <= slots; ++r)
    acc += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  return acc;
}

}  // namespace

RankingMetrics rank_and_score(const ItemScorer& scorer, std::uint32_t n_users,
                              std::uint32_t n_items, const InteractionSet& exclude_train,
                              const InteractionSet* exclude_also, const InteractionSet& test,
                              const EvalOptions& opts) {
  if (opts.k_values.empty()) throw std::invalid_argument("rank_and_score: no K values");
  const auto train_items = items_by_user(exclude_train, n_users);
  const auto also_items = exclude_also ? items_by_user(*exclude_also, n_users)
                                       : std::vector<std::vector<std::uint32_t>>(n_users);
  const auto test_items = items_by_user(test, n_users);

  std::vector<std::uint32_t> eval_users;
  for (std::uint32_t u = 0; u < n_users; ++u)
    if (!test_items[u].empty()) eval_users.push_back(u);
  if (eval_users.empty()) throw std::runtime_error("rank_and_score: no user has test items");

  const std::uint32_t max_k = *std::max_element(opts.k_values.begin(), opts.k_values.end());

  // Per-user rows first, aggregated in user order afterwards so the result
  // does not depend on the thread schedule.
  std::vector<PerUserMetrics> rows(eval_users.size());
  bool bad_scorer = false;

#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(eval_users.size()); ++idx) {
    const std::uint32_t u = eval_users[static_cast<std::size_t>(idx)];
    const std::vector<double> scores = scorer(u);
    if (scores.size() != n_items) {
#pragma omp atomic write
      bad_scorer = true;
      continue;
    }

    std::vector<std::uint32_t> candidates;
    candidates.reserve(n_items);
    const auto& ex1 = train_items[u];
    const auto& ex2 = also_items[u];
    for (std::uint32_t i = 0; i < n_items; ++i) {
      if (std::binary_search(ex1.begin(), ex1.end(), i)) continue;
      if (std::binary_search(ex2.begin(), ex2.end(), i)) continue;
      candidates.push_back(i);
    }
    auto better = [&](std::uint32_t a, std::uint32_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return a < b;
    };
    const std::size_t top_n = std::min<std::size_t>(max_k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + top_n, candidates.end(),
                      better);

    const auto& tst = test_items[u];
    PerUserMetrics& pm = rows[static_cast<std::size_t>(idx)];
    pm.user = u;
    for (std::uint32_t k : opts.k_values) {
      const std::size_t depth = std::min<std::size_t>(k, top_n);
      std::uint32_t hits = 0;
      double dcg = 0.0;
      for (std::size_t r = 0; r < depth; ++r) {
        if (std::binary_search(tst.begin(), tst.end(), candidates[r])) {
          ++hits;
          dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        }
      }
      pm.precision[k] = static_cast<double>(hits) / static_cast<double>(k);
      pm.recall[k] = static_cast<double>(hits) / static_cast<double>(tst.size());
      const double idcg = ideal_dcg(k, tst.size());
      pm.ndcg[k] = idcg > 0.0 ? dcg / idcg : 0.0;
    }
  }

  if (bad_scorer) throw std::runtime_error("rank_and_score: scorer returned wrong length");

  RankingMetrics m;
  m.n_users_evaluated = eval_users.size();
  for (std::uint32_t k : opts.k_values) {
    double p = 0.0, r = 0.0, n = 0.0;
    for (const auto& pm : rows) {
      p += pm.precision.at(k);
      r += pm.recall.at(k);
      n += pm.ndcg.at(k);
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    m.precision[k] = p * inv;
    m.recall[k] = r * inv;
    m.ndcg[k] = n * inv;
  }
  if (opts.per_user_detail) m.per_user = std::move(rows);
  return m;
}

RankingMetrics rank_and_score(const ForwardTrace& trace, const InteractionSet& exclude_train,
                              const InteractionSet* exclude_also, const InteractionSet& test,
                              const EvalOptions& opts) {
  const GraphLayout layout = trace.layout;
  const Matrix& z = trace.final_z;
  ItemScorer scorer = [&z, layout](std::uint32_t u) {
    return score_all_items(z, layout, u);
  };
  return rank_and_score(scorer, layout.n_users, layout.n_items, exclude_train, exclude_also,
                        test, opts);
}

// --- smoothness ----------------------------------------------------------------

double mean_pairwise_sq_distance(const Matrix& x) {
  // (1/n^2) sum_ij ||x_i - x_j||^2 == (2/n) sum_i ||x_i - mean||^2
  const auto mean = kernels::col_means(x);
  const double csq = kernels::centered_sq_norm(x, mean);
  return 2.0 * csq / static_cast<double>(x.rows());
}

SmoothnessReport smoothness_report(const ForwardTrace& trace, const SmoothnessOptions& opts) {
  if (trace.e_layers.empty())
    throw std::invalid_argument("smoothness_report: trace has no per-layer tables");
  const std::uint64_t n_nodes = trace.layout.node_count();
  const std::uint64_t n_sample = std::min<std::uint64_t>(opts.max_nodes, n_nodes);

  // Node sample (all nodes when they fit).
  std::vector<std::uint64_t> nodes;
  if (n_sample == n_nodes) {
    nodes.resize(n_nodes);
    for (std::uint64_t v = 0; v < n_nodes; ++v) nodes[v] = v;
  } else {
    Rng rng = Rng(opts.seed).split("smoothness_sample");
    std::vector<char> chosen(n_nodes, 0);
    // Floyd's algorithm for a uniform distinct sample.
    for (std::uint64_t j = n_nodes - n_sample; j < n_nodes; ++j) {
      std::uint64_t t = rng.uniform_int(j + 1);
      if (chosen[t]) t = j;
      chosen[t] = 1;
    }
    for (std::uint64_t v = 0; v < n_nodes; ++v)
      if (chosen[v]) nodes.push_back(v);
  }

  const std::size_t d = trace.e_layers[0].cols();
  const std::size_t L1 = trace.e_layers.size();

  // Sub-tables of the sampled nodes, per layer (ID-embedding family).
  std::vector<Matrix> sub(L1);
  for (std::size_t l = 0; l < L1; ++l) {
    sub[l] = Matrix(nodes.size(), d);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      sub[l].copy_row_from(trace.e_layers[l], nodes[k], k);
  }

  SmoothnessReport rep;
  rep.sampled_nodes = nodes.size();
  rep.mean_distance.assign(L1, 0.0);

  double global_max = 0.0;
  const std::int64_t n = static_cast<std::int64_t>(nodes.size());
  for (std::size_t l = 0; l < L1; ++l) {
    const Matrix& x = sub[l];
    double sum = 0.0, mx = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : sum) reduction(max : mx)
    for (std::int64_t i = 0; i < n; ++i) {
      const double* xi = x.row(static_cast<std::size_t>(i));
      for (std::int64_t j = i + 1; j < n; ++j) {
        const double* xj = x.row(static_cast<std::size_t>(j));
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = xi[c] - xj[c];
          acc += diff * diff;
        }
        const double dist = std::sqrt(acc);
        sum += dist;
        mx = std::max(mx, dist);
      }
    }
    const double n_pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    rep.mean_distance[l] = n_pairs > 0 ? sum / n_pairs : 0.0;
    global_max = std::max(global_max, mx);
  }

  const double hist_max = opts.hist_max > 0 ? opts.hist_max
                          : global_max > 0  ? global_max
                                            : 1.0;
  rep.bin_edges.resize(opts.bins + 1);
  for (std::uint32_t b = 0; b <= opts.bins; ++b)
    rep.bin_edges[b] = hist_max * static_cast<double>(b) / static_cast<double>(opts.bins);

  rep.histograms.assign(L1, std::vector<std::uint64_t>(opts.bins, 0));
  for (std::size_t l = 0; l < L1; ++l) {
    const Matrix& x = sub[l];
    auto& hist = rep.histograms[l];
    for (std::int64_t i = 0; i < n; ++i) {
      const double* xi = x.row(static_cast<std::size_t>(i));
      for (std::int64_t j = i + 1; j < n; ++j) {
        const double* xj = x.row(static_cast<std::size_t>(j));
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = xi[c] - xj[c];
          acc += diff * diff;
        }
        const double dist = std::sqrt(acc);
        std::uint32_t bin = hist_max > 0
                                ? static_cast<std::uint32_t>(dist / hist_max *
                                                             static_cast<double>(opts.bins))
                                : 0;
        if (bin >= opts.bins) bin = opts.bins - 1;
        hist[bin]++;
      }
    }
  }
  return rep;
}

void save_smoothness_csv(const SmoothnessReport& rep, const std::filesystem::path& means_csv,
                         const std::filesystem::path& hist_csv) {
  {
    std::ofstream out(means_csv);
    if (!out) throw std::runtime_error("cannot write " + means_csv.string());
    out << "layer,mean_distance\n";
    for (std::size_t l = 0; l < rep.mean_distance.size(); ++l)
      out << l << ',' << rep.mean_distance[l] << '\n';
  }
  {
    std::ofstream out(hist_csv);
    if (!out) throw std::runtime_error("cannot write " + hist_csv.string());
    out << "layer,bin_lo,bin_hi,count\n";
    for (std::size_t l = 0; l < rep.histograms.size(); ++l)
      for (std::size_t b = 0; b < rep.histograms[l].size(); ++b)
        out << l << ',' << rep.bin_edges[b] << ',' << rep.bin_edges[b + 1] << ','
            << rep.histograms[l][b] << '\n';
  }
}

// --- planted synthetic data -------------------------------------------------------

std::vector<CriterionSpec> synthetic_specs(std::uint32_t n_criteria) {
  return default_specs(n_criteria + 1, 1.0, 5.0);
}

RatingLog generate_synthetic(const SyntheticOptions& opts) {
  if (opts.n_users == 0 || opts.n_items == 0 || opts.n_criteria == 0)
    throw std::invalid_argument("generate_synthetic: sizes must be positive");
  if (opts.density <= 0.0 || opts.density > 1.0)
    throw std::invalid_argument("generate_synthetic: density must be in (0, 1]");
  if (opts.noise < 0.0 || opts.noise >= 1.0)
    throw std::invalid_argument("generate_synthetic: noise must be in [0, 1)");
  if (opts.rate_prob <= 0.0 || opts.rate_prob > 1.0)
    throw std::invalid_argument("generate_synthetic: rate_prob must be in (0, 1]");

  const std::uint32_t C = opts.n_criteria;
  Rng root(opts.seed);

  // Item latents: a dominant criterion with high quality, mediocre quality
  // elsewhere.
  std::vector<std::uint32_t> item_type(opts.n_items);
  Matrix quality(opts.n_items, C + 1);  // column c in 1..C
  {
    Rng rng = root.split("synth_items");
    for (std::uint32_t i = 0; i < opts.n_items; ++i) {
      item_type[i] = 1 + static_cast<std::uint32_t>(rng.uniform_int(C));
      for (std::uint32_t c = 1; c <= C; ++c)
        quality.at(i, c) = c == item_type[i] ? rng.uniform(0.55, 1.0)
                                             : rng.uniform(0.05, 0.7);
    }
  }

  // User latents: one dominant criterion holding most of the preference mass.
  std::vector<std::uint32_t> user_pref(opts.n_users);
  {
    Rng rng = root.split("synth_users");
    for (std::uint32_t u = 0; u < opts.n_users; ++u)
      user_pref[u] = 1 + static_cast<std::uint32_t>(rng.uniform_int(C));
  }
  const double w_dom = C == 1 ? 1.0 : 0.75;
  const double w_rest = C == 1 ? 0.0 : 0.25 / static_cast<double>(C - 1);

  RatingLog log;
  log.n_criteria_plus1 = C + 1;
  const std::uint32_t per_user = std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(std::llround(opts.density * opts.n_items)));

  std::vector<std::uint32_t> chosen;
  for (std::uint32_t u = 0; u < opts.n_users; ++u) {
    Rng rng = root.split("synth_ratings").split(static_cast<std::uint64_t>(u));

    // Distinct item sample (Floyd).
    chosen.clear();
    std::vector<char> mark(opts.n_items, 0);
    for (std::uint32_t j = opts.n_items - per_user; j < opts.n_items; ++j) {
      std::uint32_t t = static_cast<std::uint32_t>(rng.uniform_int(j + 1));
      if (mark[t]) t = j;
      mark[t] = 1;
    }
    for (std::uint32_t i = 0; i < opts.n_items; ++i)
      if (mark[i]) chosen.push_back(i);

    for (std::uint32_t i : chosen) {
      double blend = 0.0;
      for (std::uint32_t c = 1; c <= C; ++c)
        blend += (c == user_pref[u] ? w_dom : w_rest) * quality.at(i, c);
      double overall = 1.0 + 4.0 * blend;
      if (opts.noise > 0.0) overall += opts.noise * rng.normal();
      overall = std::clamp(overall, 1.0, 5.0);
      log.records.push_back({"u" + std::to_string(u), "i" + std::to_string(i), 0, overall});

      for (std::uint32_t c = 1; c <= C; ++c) {
        if (opts.rate_prob < 1.0 && rng.uniform() >= opts.rate_prob) continue;
        // Interest amplifies the expressed rating: users mostly hand out
        // high marks on the aspects they actually care about.
        const double interest = (c == user_pref[u] ? w_dom : w_rest) / w_dom;
        const double value =
            std::clamp(1.0 + 4.0 * quality.at(i, c) * (0.7 + 0.3 * interest), 1.0, 5.0);
        log.records.push_back({"u" + std::to_string(u), "i" + std::to_string(i), c, value});
      }
    }
  }
  return log;
}

}  // namespace mcrec
