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

#include "mcrec/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "mcrec/kernels.hpp"
#include "mcrec/log.hpp"

namespace mcrec {

BaselineKind baseline_kind_from_string(const std::string& s) {
  if (s == "lightgcn") return BaselineKind::LightGcn;
  if (s == "lightgcn_mc") return BaselineKind::LightGcnMc;
  throw std::invalid_argument("unknown baseline: " + s);
}

std::string baseline_kind_name(BaselineKind k) {
  return k == BaselineKind::LightGcn ? "lightgcn" : "lightgcn_mc";
}

ForwardTrace lightgcn_forward(const NormalizedAdjacency& adj, const GraphLayout& layout,
                              const EmbeddingState& state, std::uint32_t layers) {
  ForwardOptions opts;
  opts.layers = layers;
  opts.pairnorm = false;
  opts.keep_layers = false;
  return forward(adj, layout, state, opts);
}

TrainResult train_lightgcn(const InteractionSet& train_set, const InteractionSet& valid_set,
                           const TrainConfig& config) {
  TrainConfig c = config;
  c.variant.mc_graph = false;
  c.variant.cp = false;
  c.variant.f = false;
  return train(train_set, valid_set, c);
}

// --- LightGCN over per-criterion graphs ------------------------------------------

namespace {

// Bipartite graph of a single criterion, in the shared node layout
// (users, then one item block).
McExpansionGraph criterion_graph(const InteractionSet& train_set, std::uint32_t criterion) {
  McExpansionGraph g;
  g.layout.n_users = train_set.n_users();
  g.layout.n_items = train_set.n_items();
  g.layout.n_criteria_plus1 = 1;
  for (const auto& [u, i] : train_set.positives[criterion]) {
    g.edge_user.push_back(u);
    g.edge_node.push_back(g.layout.criterion_item_node(i, 0));
    g.edge_weight.push_back(1.0);
  }
  g.weighted_degree.assign(g.layout.node_count(), 0.0);
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    g.weighted_degree[g.edge_user[e]] += g.edge_weight[e];
    g.weighted_degree[g.edge_node[e]] += g.edge_weight[e];
  }
  return g;
}

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

inline double softplus(double x) { return x > 35.0 ? x : std::log1p(std::exp(x)); }

inline double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

LightGcnMcModel init_lightgcn_mc(const InteractionSet& train_set, const TrainConfig& config) {
  config.validate();
  LightGcnMcModel m;
  m.n_users = train_set.n_users();
  m.n_items = train_set.n_items();
  m.n_criteria_plus1 = train_set.n_criteria_plus1;
  m.dim = config.dim;
  m.layers = config.layers;

  const double bound = std::sqrt(6.0 / (2.0 * static_cast<double>(config.dim)));
  Rng root(config.seed);
  for (std::uint32_t c = 0; c < m.n_criteria_plus1; ++c) {
    m.graphs.push_back(criterion_graph(train_set, c));
    m.adjs.push_back(normalize(m.graphs.back()));
    Matrix e0(m.graphs.back().layout.node_count(), config.dim);
    Rng rng = root.split("lightgcn_mc_e0").split(static_cast<std::uint64_t>(c));
    for (double& v : e0.data()) v = rng.uniform(-bound, bound);
    m.e0.push_back(std::move(e0));
  }
  return m;
}

std::vector<Matrix> lightgcn_mc_forward(const LightGcnMcModel& model) {
  std::vector<Matrix> segments;
  segments.reserve(model.n_criteria_plus1);
  for (std::uint32_t c = 0; c < model.n_criteria_plus1; ++c) {
    if (model.graphs[c].n_edges() == 0) {
      // An edgeless criterion contributes nothing to the prediction.
      segments.emplace_back(model.e0[c].rows(), model.e0[c].cols());
      continue;
    }
    EmbeddingState st;
    st.e0 = model.e0[c];
    st.dim = model.dim;
    st.has_p = false;
    ForwardTrace tr =
        lightgcn_forward(model.adjs[c], model.graphs[c].layout, st, model.layers);
    segments.push_back(std::move(tr.final_z));
  }
  return segments;
}

double lightgcn_mc_score(const std::vector<Matrix>& segments, std::uint32_t n_users,
                         std::uint32_t user, std::uint32_t item) {
  double acc = 0.0;
  for (const auto& z : segments) {
    const double* a = z.row(user);
    const double* b = z.row(static_cast<std::size_t>(n_users) + item);
    for (std::size_t j = 0; j < z.cols(); ++j) acc += a[j] * b[j];
  }
  return acc;
}

std::vector<double> lightgcn_mc_score_all(const std::vector<Matrix>& segments,
                                          std::uint32_t n_users, std::uint32_t n_items,
                                          std::uint32_t user) {
  std::vector<double> out(n_items, 0.0);
  for (const auto& z : segments) {
    const double* a = z.row(user);
    for (std::uint32_t i = 0; i < n_items; ++i) {
      const double* b = z.row(static_cast<std::size_t>(n_users) + i);
      double acc = 0.0;
      for (std::size_t j = 0; j < z.cols(); ++j) acc += a[j] * b[j];
      out[i] += acc;
    }
  }
  return out;
}

LightGcnMcTrainResult train_lightgcn_mc(const InteractionSet& train_set,
                                        const InteractionSet& valid_set,
                                        const TrainConfig& config) {
  config.validate();
  kernels::set_num_threads(config.threads);
  LightGcnMcTrainResult res;
  res.model = init_lightgcn_mc(train_set, config);
  LightGcnMcModel& model = res.model;

  const std::uint32_t C1 = model.n_criteria_plus1;
  const std::size_t d = config.dim;
  const double inv_layers = 1.0 / (static_cast<double>(config.layers) + 1.0);
  const bool has_valid = !valid_set.positives.empty() && !valid_set.positives[0].empty();

  // Triples are overall-rating interactions in the shared segment layout.
  const McExpansionGraph& g0 = model.graphs[0];
  if (g0.n_edges() == 0)
    throw std::invalid_argument("train_lightgcn_mc: no overall interactions");
  const auto user_adj0 = user_adjacency(g0);
  const std::uint32_t num_batches = static_cast<std::uint32_t>(
      (g0.n_edges() + config.batch_size - 1) / config.batch_size);

  std::vector<AdamState> adam(C1);
  std::uint64_t t = 0;
  std::vector<Matrix> best_e0 = model.e0;
  double best_val = -std::numeric_limits<double>::infinity();
  std::uint32_t bad_epochs = 0;
  res.best_epoch = config.max_epochs;

  Rng sample_root = Rng(config.seed).split("negative_sampling");
  EvalOptions eo;
  eo.k_values = {10};

  // Per-triple staging of the three z rows of every segment.
  std::vector<double> zbuf(static_cast<std::size_t>(C1) * 3 * d);
  auto zrow = [&](std::uint32_t c, std::uint32_t which) {
    return zbuf.data() + (static_cast<std::size_t>(c) * 3 + which) * d;
  };

  for (std::uint32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<Matrix> segments = lightgcn_mc_forward(model);

    // Frozen residuals per segment: z_c(v) = a_c * e0_c(v) + b_c(v).
    std::vector<double> a_seg(C1, 0.0);
    std::vector<Matrix> b_seg(C1);
    for (std::uint32_t c = 0; c < C1; ++c) {
      a_seg[c] = model.graphs[c].n_edges() > 0 ? inv_layers : 0.0;
      b_seg[c] = segments[c];
      if (a_seg[c] != 0.0) kernels::axpy(b_seg[c], model.e0[c], -a_seg[c]);
    }

    Rng sample_rng = sample_root.split(static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    std::uint64_t triple_count = 0;

    // Row gradients of the current batch, one slot per (row, segment).
    std::vector<std::uint32_t> touched;
    std::unordered_map<std::uint32_t, std::uint32_t> slot_of;
    std::vector<double> dz;

    std::vector<double> grad(d);
    for (std::uint32_t b = 0; b < num_batches; ++b) {
      auto batch = sample_batch(g0, user_adj0, config.batch_size, NegSampling::AllCriteria,
                                sample_rng);
      touched.clear();
      slot_of.clear();
      dz.assign(static_cast<std::size_t>(3) * batch.size() * C1 * d, 0.0);
      auto slot = [&](std::uint32_t v) -> std::uint32_t {
        auto it = slot_of.find(v);
        if (it != slot_of.end()) return it->second;
        std::uint32_t s = static_cast<std::uint32_t>(touched.size());
        slot_of.emplace(v, s);
        touched.push_back(v);
        return s;
      };
      auto grad_at = [&](std::uint32_t v, std::uint32_t c) {
        return dz.data() + (static_cast<std::size_t>(slot(v)) * C1 + c) * d;
      };

      double batch_loss = 0.0;
      for (const auto& tr : batch) {
        double delta = 0.0;
        for (std::uint32_t c = 0; c < C1; ++c) {
          const double a = a_seg[c];
          const double* e0u = model.e0[c].row(tr.user);
          const double* e0p = model.e0[c].row(tr.pos_node);
          const double* e0n = model.e0[c].row(tr.neg_node);
          const double* bu = b_seg[c].row(tr.user);
          const double* bp = b_seg[c].row(tr.pos_node);
          const double* bn = b_seg[c].row(tr.neg_node);
          double* zu = zrow(c, 0);
          double* zp = zrow(c, 1);
          double* zn = zrow(c, 2);
          for (std::size_t j = 0; j < d; ++j) {
            zu[j] = a * e0u[j] + bu[j];
            zp[j] = a * e0p[j] + bp[j];
            zn[j] = a * e0n[j] + bn[j];
            delta += zu[j] * (zp[j] - zn[j]);
          }
        }
        batch_loss += softplus(-delta);
        const double g = -sigmoid(-delta);
        for (std::uint32_t c = 0; c < C1; ++c) {
          if (a_seg[c] == 0.0) continue;  // edgeless segment: constant zero
          const double* zu = zrow(c, 0);
          const double* zp = zrow(c, 1);
          const double* zn = zrow(c, 2);
          double* gu = grad_at(tr.user, c);
          double* gp = grad_at(tr.pos_node, c);
          double* gn = grad_at(tr.neg_node, c);
          for (std::size_t j = 0; j < d; ++j) {
            gu[j] += g * (zp[j] - zn[j]);
            gp[j] += g * zu[j];
            gn[j] -= g * zu[j];
          }
        }
        triple_count++;
      }

      // Batch regularization over distinct participants, all segments.
      std::set<std::uint32_t> rows(touched.begin(), touched.end());
      double reg = 0.0;
      for (std::uint32_t c = 0; c < C1; ++c)
        for (std::uint32_t r : rows) {
          const double* row = model.e0[c].row(r);
          for (std::size_t j = 0; j < d; ++j) reg += row[j] * row[j];
        }
      batch_loss += config.lambda * reg;
      if (!std::isfinite(batch_loss)) {
        log::warn("lightgcn_mc training diverged; keeping last state");
        res.model.e0 = has_valid ? best_e0 : model.e0;
        return res;
      }
      loss_sum += batch_loss;

      ++t;
      std::vector<std::uint32_t> order(rows.begin(), rows.end());
      for (std::uint32_t v : order) {
        const std::uint32_t s = slot_of[v];
        for (std::uint32_t c = 0; c < C1; ++c) {
          const double* gz = dz.data() + (static_cast<std::size_t>(s) * C1 + c) * d;
          const double* e0 = model.e0[c].row(v);
          for (std::size_t j = 0; j < d; ++j)
            grad[j] = a_seg[c] * gz[j] + 2.0 * config.lambda * e0[j];
          adam_step_row(model.e0[c], v, grad, adam[c], config.lr, kBeta1, kBeta2, kEps, t);
        }
      }
    }

    TrainLogRow row;
    row.epoch = epoch;
    row.loss = triple_count > 0 ? loss_sum / static_cast<double>(triple_count)
                                : std::numeric_limits<double>::quiet_NaN();
    if (has_valid) {
      std::vector<Matrix> segs = lightgcn_mc_forward(model);
      const std::uint32_t n_users = model.n_users;
      const std::uint32_t n_items = model.n_items;
      ItemScorer scorer = [&segs, n_users, n_items](std::uint32_t u) {
        return lightgcn_mc_score_all(segs, n_users, n_items, u);
      };
      RankingMetrics m =
          rank_and_score(scorer, n_users, n_items, train_set, nullptr, valid_set, eo);
      row.val_ndcg10 = m.ndcg.at(10);
      if (row.val_ndcg10 > best_val) {
        best_val = row.val_ndcg10;
        best_e0 = model.e0;
        res.best_epoch = epoch;
        bad_epochs = 0;
      } else {
        ++bad_epochs;
      }
    } else {
      row.val_ndcg10 = std::numeric_limits<double>::quiet_NaN();
    }
    res.log.push_back(row);
    if (has_valid && bad_epochs > config.patience) break;
  }

  if (has_valid) {
    res.model.e0 = best_e0;
    res.best_val_ndcg10 = best_val;
  } else {
    res.best_val_ndcg10 = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

}  // namespace mcrec
