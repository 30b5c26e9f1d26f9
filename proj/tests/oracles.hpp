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

// Test-only reference implementations. Deliberately naive and independent of
// the library's sparse kernels: dense matrices, full sorts, O(n^2) loops.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mcrec/graph.hpp"
#include "mcrec/matrix.hpp"
#include "mcrec/rng.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// Dense symmetric-normalized adjacency built straight from the edge list.
inline Dense dense_normalized_adjacency(const mcrec::McExpansionGraph& g) {
  const std::size_t n = g.layout.node_count();
  Dense a(n, std::vector<double>(n, 0.0));
  std::vector<double> deg(n, 0.0);
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    a[g.edge_user[e]][g.edge_node[e]] += g.edge_weight[e];
    a[g.edge_node[e]][g.edge_user[e]] += g.edge_weight[e];
    deg[g.edge_user[e]] += g.edge_weight[e];
    deg[g.edge_node[e]] += g.edge_weight[e];
  }
  Dense out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j] != 0.0) out[i][j] = a[i][j] / (std::sqrt(deg[i]) * std::sqrt(deg[j]));
  return out;
}

inline mcrec::Matrix dense_apply(const Dense& a, const mcrec::Matrix& x) {
  mcrec::Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) {
      if (a[i][j] == 0.0) continue;
      for (std::size_t c = 0; c < x.cols(); ++c) y.at(i, c) += a[i][j] * x.at(j, c);
    }
  return y;
}

// Uniform layer average of A^l X over l = 0..L.
inline mcrec::Matrix dense_layer_average(const Dense& a, const mcrec::Matrix& x0,
                                         std::uint32_t layers) {
  mcrec::Matrix cur = x0;
  mcrec::Matrix sum = x0;
  for (std::uint32_t l = 1; l <= layers; ++l) {
    cur = dense_apply(a, cur);
    for (std::size_t k = 0; k < sum.data().size(); ++k) sum.data()[k] += cur.data()[k];
  }
  const double inv = 1.0 / (static_cast<double>(layers) + 1.0);
  for (double& v : sum.data()) v *= inv;
  return sum;
}

// Random small expansion graph for property tests.
struct RandomGraphSpec {
  std::uint32_t max_users = 6;
  std::uint32_t max_items = 4;
  std::uint32_t max_criteria_plus1 = 3;
  double edge_prob = 0.4;
};

inline mcrec::McExpansionGraph random_graph(mcrec::Rng& rng, const RandomGraphSpec& spec) {
  mcrec::McExpansionGraph g;
  g.layout.n_users = 1 + static_cast<std::uint32_t>(rng.uniform_int(spec.max_users));
  g.layout.n_items = 1 + static_cast<std::uint32_t>(rng.uniform_int(spec.max_items));
  g.layout.n_criteria_plus1 =
      1 + static_cast<std::uint32_t>(rng.uniform_int(spec.max_criteria_plus1));
  for (std::uint32_t u = 0; u < g.layout.n_users; ++u)
    for (std::uint32_t c = 0; c < g.layout.n_criteria_plus1; ++c)
      for (std::uint32_t i = 0; i < g.layout.n_items; ++i)
        if (rng.uniform() < spec.edge_prob) {
          g.edge_user.push_back(u);
          g.edge_node.push_back(g.layout.criterion_item_node(i, c));
          g.edge_weight.push_back(c == 0 ? 1.5 : 1.0);
        }
  // Guarantee at least one edge.
  if (g.edge_user.empty()) {
    g.edge_user.push_back(0);
    g.edge_node.push_back(g.layout.criterion_item_node(0, 0));
    g.edge_weight.push_back(1.5);
  }
  g.weighted_degree.assign(g.layout.node_count(), 0.0);
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    g.weighted_degree[g.edge_user[e]] += g.edge_weight[e];
    g.weighted_degree[g.edge_node[e]] += g.edge_weight[e];
  }
  return g;
}

inline mcrec::Matrix random_matrix(mcrec::Rng& rng, std::size_t rows, std::size_t cols,
                                   double lo = -1.0, double hi = 1.0) {
  mcrec::Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

// --- brute-force ranking metrics ---------------------------------------------

struct BruteMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
};

// Full selection-sort ranking and direct metric formulas.
inline BruteMetrics brute_force_metrics(const std::vector<double>& scores,
                                        const std::vector<std::uint32_t>& exclude,
                                        const std::vector<std::uint32_t>& test,
                                        std::uint32_t k) {
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t i = 0; i < scores.size(); ++i)
    if (std::find(exclude.begin(), exclude.end(), i) == exclude.end())
      candidates.push_back(i);

  // Selection sort by (score desc, index asc).
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    std::size_t best = a;
    for (std::size_t b = a + 1; b < candidates.size(); ++b) {
      if (scores[candidates[b]] > scores[candidates[best]] ||
          (scores[candidates[b]] == scores[candidates[best]] &&
           candidates[b] < candidates[best]))
        best = b;
    }
    std::swap(candidates[a], candidates[best]);
  }

  const std::size_t depth = std::min<std::size_t>(k, candidates.size());
  std::uint32_t hits = 0;
  double dcg = 0.0;
  for (std::size_t r = 0; r < depth; ++r) {
    if (std::find(test.begin(), test.end(), candidates[r]) != test.end()) {
      ++hits;
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min<std::size_t>(k, test.size()); ++r)
    idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);

  BruteMetrics m;
  m.precision = static_cast<double>(hits) / static_cast<double>(k);
  m.recall = test.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(test.size());
  m.ndcg = idcg > 0.0 ? dcg / idcg : 0.0;
  return m;
}

// --- finite differences ---------------------------------------------------------

// Central finite difference of f w.r.t. every entry of params.
inline std::vector<double> finite_diff(std::vector<double>& params,
                                       const std::function<double()>& f, double h = 1e-5) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double fp = f();
    params[i] = keep - h;
    const double fm = f();
    params[i] = keep;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// O(n^2) mean pairwise squared distance (ordered pairs, diagonal included).
inline double brute_mean_pairwise_sq(const mcrec::Matrix& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double diff = x.at(i, c) - x.at(j, c);
        d2 += diff * diff;
      }
      acc += d2;
    }
  const double n = static_cast<double>(x.rows());
  return acc / (n * n);
}

}  // namespace oracle
