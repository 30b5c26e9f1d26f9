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

#include "mcrec/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_map>

#include "mcrec/evaluation.hpp"
#include "mcrec/kernels.hpp"
#include "mcrec/log.hpp"

namespace mcrec {

// --- variants & config -------------------------------------------------------

VariantFlags parse_variant(const std::string& text) {
  VariantFlags v;
  if (text.empty() || text == "full") return v;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of("+,", start);
    if (end == std::string::npos) end = text.size();
    std::string part = text.substr(start, end - start);
    if (part == "mc_only") v.mc_graph = false;
    else if (part == "no_cp") v.cp = false;
    else if (part == "no_f") v.f = false;
    else if (part == "full" || part.empty()) {}
    else throw std::invalid_argument("unknown variant: " + part);
    start = end + 1;
  }
  return v;
}

std::string variant_name(const VariantFlags& v) {
  std::vector<std::string> parts;
  if (!v.mc_graph) parts.push_back("mc_only");
  if (!v.cp) parts.push_back("no_cp");
  if (!v.f) parts.push_back("no_f");
  if (parts.empty()) return "full";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
  return out;
}

std::string variant_label(const VariantFlags& v) {
  std::string label = "CPA-LGC";
  if (!v.mc_graph) label += "-MC";
  if (!v.cp) label += "-c";
  if (!v.f) label += "-f";
  return label;
}

void TrainConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("config: layers must be >= 1");
  if (dim < 1) throw std::invalid_argument("config: dim must be >= 1");
  if (lr <= 0 || lambda < 0 || alpha <= 0 || scale <= 0)
    throw std::invalid_argument("config: lr/alpha/scale must be > 0, lambda >= 0");
  if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("config: max_epochs must be >= 1");
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"layers", c.layers},
          {"dim", c.dim},
          {"lr", c.lr},
          {"lambda", c.lambda},
          {"alpha", c.alpha},
          {"s", c.scale},
          {"pairnorm", c.pairnorm},
          {"pairnorm_layer0", c.pairnorm_layer0},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed},
          {"variant", variant_name(c.variant)},
          {"neg_sampling", c.neg_sampling == NegSampling::AllCriteria ? "all" : "overall_only"},
          {"threads", c.threads},
          {"use_rating_weights", c.use_rating_weights}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.layers = j.value("layers", c.layers);
  c.dim = j.value("dim", c.dim);
  c.lr = j.value("lr", c.lr);
  c.lambda = j.value("lambda", c.lambda);
  c.alpha = j.value("alpha", c.alpha);
  c.scale = j.value("s", c.scale);
  c.pairnorm = j.value("pairnorm", c.pairnorm);
  c.pairnorm_layer0 = j.value("pairnorm_layer0", c.pairnorm_layer0);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.seed = j.value("seed", c.seed);
  c.variant = parse_variant(j.value("variant", "full"));
  std::string neg = j.value("neg_sampling", "all");
  c.neg_sampling = neg == "overall_only" ? NegSampling::OverallOnly : NegSampling::AllCriteria;
  c.threads = j.value("threads", c.threads);
  c.use_rating_weights = j.value("use_rating_weights", c.use_rating_weights);
  c.validate();
  return c;
}

// --- sampling -----------------------------------------------------------------

std::vector<BprTriple> sample_batch(const McExpansionGraph& g,
                                    const std::vector<std::vector<std::uint32_t>>& user_adj,
                                    std::uint32_t batch_size, NegSampling mode, Rng& rng) {
  if (g.n_edges() == 0) throw std::invalid_argument("sample_batch: graph has no edges");
  const std::uint64_t lo = g.layout.n_users;
  const std::uint64_t hi = mode == NegSampling::OverallOnly
                               ? lo + g.layout.n_items
                               : g.layout.node_count();
  const std::uint64_t n_candidates = hi - lo;

  std::vector<BprTriple> batch;
  batch.reserve(batch_size);
  bool warned = false;
  std::uint32_t guard = 0;
  while (batch.size() < batch_size) {
    if (++guard > 100 * batch_size + 1000)
      throw std::runtime_error("sample_batch: could not draw negatives (graph too dense)");
    const std::size_t e = static_cast<std::size_t>(rng.uniform_int(g.n_edges()));
    const std::uint32_t u = g.edge_user[e];
    const auto& adj = user_adj[u];

    // Count of adjacent nodes inside the candidate range.
    std::size_t adj_in_range =
        mode == NegSampling::OverallOnly
            ? static_cast<std::size_t>(
                  std::upper_bound(adj.begin(), adj.end(), static_cast<std::uint32_t>(hi - 1)) -
                  adj.begin())
            : adj.size();
    if (adj_in_range >= n_candidates) {
      if (!warned) {
        log::warn("user " + std::to_string(u) + " is adjacent to every candidate node; skipped");
        warned = true;
      }
      continue;
    }

    for (;;) {
      const std::uint32_t cand = static_cast<std::uint32_t>(lo + rng.uniform_int(n_candidates));
      if (!std::binary_search(adj.begin(), adj.end(), cand)) {
        batch.push_back({u, g.edge_node[e], cand});
        break;
      }
    }
  }
  return batch;
}

// --- loss ----------------------------------------------------------------------

namespace {

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

double bpr_loss(std::span<const double> pos, std::span<const double> neg, double reg_norm_sq,
                double lambda) {
  if (pos.size() != neg.size()) throw std::invalid_argument("bpr_loss: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < pos.size(); ++k) acc += softplus(neg[k] - pos[k]);
  return acc + lambda * reg_norm_sq;
}

void batch_scores(const ForwardTrace& trace, const std::vector<BprTriple>& batch,
                  std::vector<double>& pos, std::vector<double>& neg) {
  pos.resize(batch.size());
  neg.resize(batch.size());
  const Matrix& z = trace.final_z;
  const std::size_t d = z.cols();
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const double* u = z.row(batch[k].user);
    const double* p = z.row(batch[k].pos_node);
    const double* n = z.row(batch[k].neg_node);
    double sp = 0.0, sn = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      sp += u[j] * p[j];
      sn += u[j] * n[j];
    }
    pos[k] = sp;
    neg[k] = sn;
  }
}

double reg_norm_sq(const EmbeddingState& state, const GraphLayout& layout,
                   const std::vector<BprTriple>& batch) {
  std::set<std::uint32_t> rows;
  std::set<std::uint32_t> users;
  for (const auto& t : batch) {
    rows.insert(t.user);
    rows.insert(t.pos_node);
    rows.insert(t.neg_node);
    users.insert(t.user);
  }
  double acc = 0.0;
  for (std::uint32_t r : rows) {
    const double* row = state.e0.row(r);
    for (std::size_t j = 0; j < state.e0.cols(); ++j) acc += row[j] * row[j];
  }
  if (state.has_p) {
    for (std::uint32_t u : users) {
      if (u >= layout.n_users) continue;
      const double* row = state.p0_user.row(u);
      for (std::size_t j = 0; j < state.p0_user.cols(); ++j) acc += row[j] * row[j];
    }
  }
  return acc;
}

// --- exact backward --------------------------------------------------------------

Gradients backward(const NormalizedAdjacency& adj, const EmbeddingState& state,
                   const ForwardTrace& trace, const std::vector<BprTriple>& batch,
                   double lambda) {
  if (!trace.opts.keep_layers)
    throw std::invalid_argument("backward: trace must be produced with keep_layers");
  const GraphLayout& layout = trace.layout;
  const std::uint32_t L = trace.opts.layers;
  const double s = trace.opts.scale;
  const double inv = 1.0 / (static_cast<double>(L) + 1.0);
  const std::size_t d = trace.final_z.cols();

  // Gradient of the pairwise loss w.r.t. the final representation rows.
  Matrix g_z(layout.node_count(), d);
  const Matrix& z = trace.final_z;
  for (const auto& t : batch) {
    const double* zu = z.row(t.user);
    const double* zp = z.row(t.pos_node);
    const double* zn = z.row(t.neg_node);
    double delta = 0.0;
    for (std::size_t j = 0; j < d; ++j) delta += zu[j] * (zp[j] - zn[j]);
    const double g = -sigmoid(-delta);  // d loss / d delta
    double* gu = g_z.row(t.user);
    double* gp = g_z.row(t.pos_node);
    double* gn = g_z.row(t.neg_node);
    for (std::size_t j = 0; j < d; ++j) {
      gu[j] += g * (zp[j] - zn[j]);
      gp[j] += g * zu[j];
      gn[j] -= g * zu[j];
    }
  }

  Gradients out;

  // E family: fully differentiable chain.
  {
    Matrix d_star = kernels::pairnorm_vjp(trace.e_comb, g_z, trace.e_comb_stats, s);
    Matrix acc(layout.node_count(), d);
    Matrix scratch(layout.node_count(), d);
    for (std::uint32_t l = L; l >= 1; --l) {
      Matrix total = acc;
      kernels::axpy(total, d_star, inv);
      Matrix d_pre = kernels::pairnorm_vjp(trace.e_layers[l], total, trace.e_stats[l], s);
      kernels::propagate(adj, d_pre, scratch);  // adjacency is symmetric
      acc = scratch;
    }
    Matrix total0 = acc;
    kernels::axpy(total0, d_star, inv);
    out.e0 = kernels::pairnorm_vjp(trace.e_layers[0], total0, trace.e_stats[0], s);
  }

  // P family: criterion-item rows are detached everywhere, so only the
  // layer-0 user rows carry gradient.
  if (trace.has_p) {
    Matrix g_p = g_z;
    for (std::uint64_t v = layout.n_users; v < layout.node_count(); ++v) {
      double* r = g_p.row(v);
      for (std::size_t j = 0; j < d; ++j) r[j] = 0.0;
    }
    Matrix d_star = kernels::pairnorm_vjp(trace.p_comb, g_p, trace.p_comb_stats, s);
    // Rows past the user block are constants of the combination.
    Matrix d_p0_in(layout.node_count(), d);
    for (std::uint32_t u = 0; u < layout.n_users; ++u) {
      const double* src = d_star.row(u);
      double* dst = d_p0_in.row(u);
      for (std::size_t j = 0; j < d; ++j) dst[j] = inv * src[j];
    }
    Matrix d_p0 = kernels::pairnorm_vjp(trace.p_layers[0], d_p0_in, trace.p_stats[0], s);
    out.p0_user = Matrix(layout.n_users, d);
    for (std::uint32_t u = 0; u < layout.n_users; ++u)
      out.p0_user.copy_row_from(d_p0, u, u);
    out.p0_proto = Matrix(layout.n_criteria_plus1, d);
  }

  // Batch regularization: 2 * lambda * layer-0 row for each distinct
  // participant.
  if (lambda > 0.0) {
    std::set<std::uint32_t> rows, users;
    for (const auto& t : batch) {
      rows.insert(t.user);
      rows.insert(t.pos_node);
      rows.insert(t.neg_node);
      users.insert(t.user);
    }
    for (std::uint32_t r : rows) {
      double* g = out.e0.row(r);
      const double* p = state.e0.row(r);
      for (std::size_t j = 0; j < d; ++j) g[j] += 2.0 * lambda * p[j];
    }
    if (trace.has_p) {
      for (std::uint32_t u : users) {
        double* g = out.p0_user.row(u);
        const double* p = state.p0_user.row(u);
        for (std::size_t j = 0; j < d; ++j) g[j] += 2.0 * lambda * p[j];
      }
    }
  }
  return out;
}

// --- Adam -------------------------------------------------------------------------

void adam_step(Matrix& params, const Matrix& grads, AdamState& st, double lr, double beta1,
               double beta2, double eps, std::uint64_t t) {
  require_same_shape(params, grads, "adam_step");
  if (!st.m.same_shape(params)) {
    st.m = Matrix(params.rows(), params.cols());
    st.v = Matrix(params.rows(), params.cols());
  }
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  double* p = params.data().data();
  double* m = st.m.data().data();
  double* v = st.v.data().data();
  const double* g = grads.data().data();
  const std::int64_t n = static_cast<std::int64_t>(params.data().size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mh = m[i] / bc1;
    const double vh = v[i] / bc2;
    p[i] -= lr * mh / (std::sqrt(vh) + eps);
  }
}

void adam_step_row(Matrix& params, std::uint32_t row, std::span<const double> grad,
                   AdamState& st, double lr, double beta1, double beta2, double eps,
                   std::uint64_t t) {
  if (!st.m.same_shape(params)) {
    st.m = Matrix(params.rows(), params.cols());
    st.v = Matrix(params.rows(), params.cols());
  }
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  double* p = params.row(row);
  double* m = st.m.row(row);
  double* v = st.v.row(row);
  for (std::size_t j = 0; j < grad.size(); ++j) {
    m[j] = beta1 * m[j] + (1.0 - beta1) * grad[j];
    v[j] = beta2 * v[j] + (1.0 - beta2) * grad[j] * grad[j];
    const double mh = m[j] / bc1;
    const double vh = v[j] / bc2;
    p[j] -= lr * mh / (std::sqrt(vh) + eps);
  }
}

// --- training loop -------------------------------------------------------------------

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

double affine_gain(const kernels::PairNormStats& st, double s, std::uint64_t n) {
  if (st.identity) return 1.0;
  return s * std::sqrt(static_cast<double>(n)) / st.frob;
}

double eval_ndcg10(const NormalizedAdjacency& adj, const GraphLayout& layout,
                   const EmbeddingState& state, const ForwardOptions& fwd,
                   const InteractionSet& train_set, const InteractionSet& valid_set) {
  ForwardOptions opts = fwd;
  opts.keep_layers = false;
  ForwardTrace trace = forward(adj, layout, state, opts);
  EvalOptions eo;
  eo.k_values = {10};
  RankingMetrics m = rank_and_score(trace, train_set, nullptr, valid_set, eo);
  return m.ndcg.at(10);
}

}  // namespace

TrainResult train(const InteractionSet& train_set, const InteractionSet& valid_set,
                  const TrainConfig& config) {
  config.validate();
  kernels::set_num_threads(config.threads);

  BuildGraphOptions gopts;
  gopts.alpha = config.alpha;
  gopts.n_criteria_use = config.variant.mc_graph ? 0 : 1;
  gopts.use_rating_weights = config.use_rating_weights;

  TrainResult res;
  res.graph = build_graph(train_set, gopts);
  res.layout = res.graph.layout;
  res.adj = normalize(res.graph);

  const GraphLayout& layout = res.layout;
  EmbeddingState state = init_embeddings(layout, config.dim, config.seed, config.variant.cp);

  ForwardOptions fwd;
  fwd.layers = config.layers;
  fwd.scale = config.scale;
  fwd.pairnorm = config.pairnorm && config.variant.f;
  fwd.pairnorm_layer0 = config.pairnorm_layer0;
  fwd.keep_layers = false;
  fwd.strict_degenerate = false;

  const auto user_adj = user_adjacency(res.graph);
  const std::uint64_t n_edges = res.graph.n_edges();
  const std::uint32_t num_batches = static_cast<std::uint32_t>(
      (n_edges + config.batch_size - 1) / config.batch_size);
  const double inv_layers = 1.0 / (static_cast<double>(config.layers) + 1.0);
  const std::size_t d = config.dim;
  const bool has_valid = !valid_set.positives.empty() && !valid_set.positives[0].empty();

  AdamState adam_e0, adam_p0;
  std::uint64_t t = 0;

  EmbeddingState best = state;
  EmbeddingState last_good = state;
  double best_val = -std::numeric_limits<double>::infinity();
  std::uint32_t bad_epochs = 0;

  Rng root(config.seed);
  Rng sample_root = root.split("negative_sampling");

  // Batch scratch: gradient slots for the rows a batch touches.
  std::vector<std::uint32_t> touched;
  std::unordered_map<std::uint32_t, std::uint32_t> slot_of;
  std::vector<double> dz;  // slot-major gradient w.r.t. final rows

  for (std::uint32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();

    // Refresh the propagated context once per epoch; batches update the
    // layer-0 rows through the combination term against this context.
    ForwardTrace trace = forward(res.adj, layout, state, fwd);
    const double gain_e =
        affine_gain(trace.e_comb_stats, config.scale, layout.node_count()) *
        affine_gain(trace.e_stats[0], config.scale, layout.node_count());
    const double a_e = gain_e * inv_layers;
    Matrix b_e = trace.e_comb;
    kernels::axpy(b_e, state.e0, -a_e);

    double a_p = 0.0;
    Matrix b_p;
    if (state.has_p) {
      const double gain_p =
          affine_gain(trace.p_comb_stats, config.scale, layout.node_count()) *
          affine_gain(trace.p_stats[0], config.scale, layout.node_count());
      a_p = gain_p * inv_layers;
      b_p = Matrix(layout.n_users, d);
      for (std::uint32_t u = 0; u < layout.n_users; ++u) {
        const double* comb = trace.p_comb.row(u);
        const double* p0 = state.p0_user.row(u);
        double* out = b_p.row(u);
        for (std::size_t j = 0; j < d; ++j) out[j] = comb[j] - a_p * p0[j];
      }
    }

    auto z_of = [&](std::uint32_t v, double* out) {
      const double* e0 = state.e0.row(v);
      const double* be = b_e.row(v);
      for (std::size_t j = 0; j < d; ++j) out[j] = a_e * e0[j] + be[j];
      if (state.has_p) {
        if (v < layout.n_users) {
          const double* p0 = state.p0_user.row(v);
          const double* bp = b_p.row(v);
          for (std::size_t j = 0; j < d; ++j) out[j] += a_p * p0[j] + bp[j];
        } else {
          const double* pc = trace.p_comb.row(v);
          for (std::size_t j = 0; j < d; ++j) out[j] += pc[j];
        }
      }
    };

    Rng sample_rng = sample_root.split(static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    std::uint64_t triple_count = 0;
    bool non_finite = false;

    std::vector<double> zu(d), zp(d), zn(d);
    for (std::uint32_t b = 0; b < num_batches && !non_finite; ++b) {
      auto batch = sample_batch(res.graph, user_adj, config.batch_size,
                                config.neg_sampling, sample_rng);

      touched.clear();
      slot_of.clear();
      auto slot = [&](std::uint32_t v) -> std::uint32_t {
        auto it = slot_of.find(v);
        if (it != slot_of.end()) return it->second;
        std::uint32_t sidx = static_cast<std::uint32_t>(touched.size());
        slot_of.emplace(v, sidx);
        touched.push_back(v);
        return sidx;
      };
      dz.assign(3 * batch.size() * d, 0.0);  // generous upper bound on slots

      double batch_loss = 0.0;
      for (const auto& tr : batch) {
        z_of(tr.user, zu.data());
        z_of(tr.pos_node, zp.data());
        z_of(tr.neg_node, zn.data());
        double delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) delta += zu[j] * (zp[j] - zn[j]);
        batch_loss += softplus(-delta);
        const double g = -sigmoid(-delta);
        double* gu = dz.data() + slot(tr.user) * d;
        double* gp = dz.data() + slot(tr.pos_node) * d;
        double* gn = dz.data() + slot(tr.neg_node) * d;
        for (std::size_t j = 0; j < d; ++j) {
          gu[j] += g * (zp[j] - zn[j]);
          gp[j] += g * zu[j];
          gn[j] -= g * zu[j];
        }
      }
      batch_loss += config.lambda * reg_norm_sq(state, layout, batch);
      if (!std::isfinite(batch_loss)) {
        non_finite = true;
        break;
      }
      loss_sum += batch_loss;
      triple_count += batch.size();

      // Apply lazy Adam to the touched rows, in sorted order for
      // reproducibility.
      ++t;
      std::vector<std::uint32_t> order(touched);
      std::sort(order.begin(), order.end());
      std::vector<double> ge(d), gp_row(d);
      for (std::uint32_t v : order) {
        const double* gz = dz.data() + slot_of[v] * d;
        const double* e0 = state.e0.row(v);
        for (std::size_t j = 0; j < d; ++j)
          ge[j] = a_e * gz[j] + 2.0 * config.lambda * e0[j];
        adam_step_row(state.e0, v, ge, adam_e0, config.lr, kBeta1, kBeta2, kEps, t);
        if (state.has_p && v < layout.n_users) {
          const double* p0 = state.p0_user.row(v);
          for (std::size_t j = 0; j < d; ++j)
            gp_row[j] = a_p * gz[j] + 2.0 * config.lambda * p0[j];
          adam_step_row(state.p0_user, v, gp_row, adam_p0, config.lr, kBeta1, kBeta2, kEps, t);
        }
      }
    }

    const auto t1 = std::chrono::steady_clock::now();
    TrainLogRow row;
    row.epoch = epoch;
    row.loss = triple_count > 0 ? loss_sum / static_cast<double>(triple_count)
                                : std::numeric_limits<double>::quiet_NaN();
    row.seconds = std::chrono::duration<double>(t1 - t0).count();

    if (non_finite) {
      log::warn("training diverged (non-finite loss) at epoch " + std::to_string(epoch) +
                "; keeping last good state");
      res.aborted_non_finite = true;
      row.val_ndcg10 = std::numeric_limits<double>::quiet_NaN();
      res.log.push_back(row);
      res.state = has_valid ? best : last_good;
      return res;
    }
    last_good = state;

    if (has_valid) {
      row.val_ndcg10 = eval_ndcg10(res.adj, layout, state, fwd, train_set, valid_set);
      if (row.val_ndcg10 > best_val) {
        best_val = row.val_ndcg10;
        best = state;
        res.best_epoch = epoch;
        bad_epochs = 0;
      } else {
        ++bad_epochs;
      }
    } else {
      row.val_ndcg10 = std::numeric_limits<double>::quiet_NaN();
    }
    res.log.push_back(row);
    log::debug("epoch " + std::to_string(epoch) + " loss " + std::to_string(row.loss) +
               " val_ndcg10 " + std::to_string(row.val_ndcg10));

    if (has_valid && bad_epochs > config.patience) break;
  }

  res.state = has_valid ? best : state;
  res.best_val_ndcg10 = has_valid ? best_val : std::numeric_limits<double>::quiet_NaN();
  if (!has_valid) res.best_epoch = config.max_epochs;
  return res;
}

void save_train_log(const std::vector<TrainLogRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,loss,val_ndcg10,epoch_seconds\n";
  for (const auto& r : rows)
    out << r.epoch << ',' << r.loss << ',' << r.val_ndcg10 << ',' << r.seconds << '\n';
}

}  // namespace mcrec
