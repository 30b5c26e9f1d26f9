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

#include "mcrec/model.hpp"

#include <cmath>
#include <stdexcept>

#include "mcrec/log.hpp"
#include "mcrec/rng.hpp"

namespace mcrec {

EmbeddingState init_embeddings(const GraphLayout& layout, std::uint32_t d,
                               std::uint64_t seed, bool with_p) {
  if (d == 0) throw std::invalid_argument("init_embeddings: dimension must be positive");
  EmbeddingState st;
  st.dim = d;
  st.has_p = with_p;
  const double bound = std::sqrt(6.0 / (static_cast<double>(d) + static_cast<double>(d)));

  Rng root(seed);
  auto fill_uniform = [&](Matrix& m, Rng rng) {
    for (double& v : m.data()) v = rng.uniform(-bound, bound);
  };

  st.e0 = Matrix(layout.node_count(), d);
  fill_uniform(st.e0, root.split("init_e0"));
  if (with_p) {
    st.p0_user = Matrix(layout.n_users, d);
    fill_uniform(st.p0_user, root.split("init_p0_user"));
    st.p0_proto = Matrix(layout.n_criteria_plus1, d);
    fill_uniform(st.p0_proto, root.split("init_p0_proto"));
  }
  return st;
}

Matrix assemble_p0(const EmbeddingState& state, const GraphLayout& layout) {
  if (!state.has_p) throw std::logic_error("assemble_p0: state has no preference tables");
  Matrix p0(layout.node_count(), state.dim);
  for (std::uint32_t u = 0; u < layout.n_users; ++u) p0.copy_row_from(state.p0_user, u, u);
  for (std::uint32_t c = 0; c < layout.n_criteria_plus1; ++c)
    for (std::uint32_t i = 0; i < layout.n_items; ++i)
      p0.copy_row_from(state.p0_proto, c, layout.criterion_item_node(i, c));
  return p0;
}

namespace {

void check_finite(const Matrix& m, std::uint32_t layer, const char* family) {
  for (double v : m.data())
    if (!std::isfinite(v))
      throw std::runtime_error(std::string("forward: non-finite value in ") + family +
                               " at layer " + std::to_string(layer));
}

// f at one point of the chain: pairnorm when enabled, identity otherwise.
kernels::PairNormStats apply_f(const Matrix& x, Matrix& y, bool enabled, double s,
                               bool strict) {
  if (!enabled) {
    kernels::PairNormStats st;
    st.identity = true;
    if (!y.same_shape(x)) y = Matrix(x.rows(), x.cols());
    y.data() = x.data();
    return st;
  }
  kernels::PairNormStats st = kernels::pairnorm(x, s, y, strict);
  if (st.identity)
    log::warn("pairnorm input degenerate (all rows equal); passing through");
  return st;
}

// Overwrite the criterion-item rows of a preference table with the values
// of a reference table. Used only by the finite-difference harness to pin
// the detached rows.
void overwrite_detached_rows(Matrix& table, const Matrix& ref, const GraphLayout& layout) {
  for (std::uint64_t v = layout.n_users; v < layout.node_count(); ++v)
    table.copy_row_from(ref, v, v);
}

}  // namespace

ForwardTrace forward(const NormalizedAdjacency& adj, const GraphLayout& layout,
                     const EmbeddingState& state, const ForwardOptions& opts) {
  if (opts.layers < 1) throw std::invalid_argument("forward: need at least one layer");
  if (adj.n_nodes != layout.node_count())
    throw std::invalid_argument("forward: adjacency/layout node count mismatch");
  if (state.e0.rows() != layout.node_count())
    throw std::invalid_argument("forward: embedding table row count != |V|");

  const std::uint32_t L = opts.layers;
  const double inv_layers = 1.0 / (static_cast<double>(L) + 1.0);

  ForwardTrace tr;
  tr.layout = layout;
  tr.opts = opts;
  tr.has_p = state.has_p;

  struct StackResult {
    std::vector<Matrix> layers;
    std::vector<kernels::PairNormStats> stats;
    Matrix comb;
    kernels::PairNormStats comb_stats;
  };

  // One propagation stack; is_p switches on the stop-gradient row freezing
  // hook used by the gradient tests.
  auto run_stack = [&](const Matrix& x0, bool is_p, const char* family) {
    StackResult res;
    Matrix cur;  // post-f table of the current layer
    kernels::PairNormStats st0 =
        apply_f(x0, cur, opts.pairnorm && opts.pairnorm_layer0, opts.scale,
                opts.strict_degenerate);
    if (is_p && opts.freeze_p_from != nullptr)
      overwrite_detached_rows(cur, opts.freeze_p_from->p_layers.at(0), layout);
    check_finite(cur, 0, family);

    Matrix sum = cur;  // running sum for the layer combination
    res.stats.push_back(std::move(st0));
    if (opts.keep_layers) res.layers.push_back(cur);

    Matrix propagated(x0.rows(), x0.cols());
    for (std::uint32_t l = 1; l <= L; ++l) {
      kernels::PairNormStats st;
      if (is_p && opts.freeze_p_from != nullptr) {
        // Past layer 0 every preference row is detached, so the whole table
        // is a constant of the reference forward.
        cur = opts.freeze_p_from->p_layers.at(l);
        st = opts.freeze_p_from->p_stats.at(l);
      } else {
        kernels::propagate(adj, cur, propagated);
        st = apply_f(propagated, cur, opts.pairnorm, opts.scale, opts.strict_degenerate);
      }
      check_finite(cur, l, family);
      kernels::axpy(sum, cur, 1.0);
      res.stats.push_back(std::move(st));
      if (opts.keep_layers) res.layers.push_back(cur);
    }

    Matrix star(sum.rows(), sum.cols());
    {
      double* out = star.data().data();
      const double* in = sum.data().data();
      const std::int64_t n = static_cast<std::int64_t>(sum.data().size());
      for (std::int64_t k = 0; k < n; ++k) out[k] = in[k] * inv_layers;
    }
    res.comb_stats = apply_f(star, res.comb, opts.pairnorm, opts.scale,
                             opts.strict_degenerate);
    if (is_p && opts.freeze_p_from != nullptr)
      overwrite_detached_rows(res.comb, opts.freeze_p_from->p_comb, layout);
    return res;
  };

  StackResult e = run_stack(state.e0, false, "E");
  tr.e_layers = std::move(e.layers);
  tr.e_stats = std::move(e.stats);
  tr.e_comb = std::move(e.comb);
  tr.e_comb_stats = std::move(e.comb_stats);

  if (state.has_p) {
    Matrix p0 = assemble_p0(state, layout);
    StackResult p = run_stack(p0, true, "P");
    tr.p_layers = std::move(p.layers);
    tr.p_stats = std::move(p.stats);
    tr.p_comb = std::move(p.comb);
    tr.p_comb_stats = std::move(p.comb_stats);

    tr.final_z = tr.e_comb;
    kernels::axpy(tr.final_z, tr.p_comb, 1.0);
  } else {
    tr.final_z = tr.e_comb;
  }
  return tr;
}

double predict(const ForwardTrace& trace, std::uint32_t u, std::uint32_t item,
               std::uint32_t criterion) {
  const GraphLayout& lo = trace.layout;
  if (u >= lo.n_users || item >= lo.n_items || criterion >= lo.n_criteria_plus1)
    throw std::out_of_range("predict: index out of range");
  const double* a = trace.final_z.row(u);
  const double* b = trace.final_z.row(lo.criterion_item_node(item, criterion));
  double acc = 0.0;
  for (std::size_t j = 0; j < trace.final_z.cols(); ++j) acc += a[j] * b[j];
  return acc;
}

std::vector<double> score_all_items(const Matrix& final_z, const GraphLayout& layout,
                                    std::uint32_t u) {
  if (u >= layout.n_users) throw std::out_of_range("score_all_items: bad user index");
  std::vector<double> out;
  kernels::scores_against_block(final_z, u, layout.criterion_item_node(0, 0),
                                layout.n_items, out);
  return out;
}

std::vector<double> score_all_items(const ForwardTrace& trace, std::uint32_t u) {
  return score_all_items(trace.final_z, trace.layout, u);
}

}  // namespace mcrec
