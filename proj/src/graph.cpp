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

#include "mcrec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mcrec {

McExpansionGraph build_graph(const InteractionSet& train, const BuildGraphOptions& opts) {
  if (opts.alpha <= 0.0) throw std::invalid_argument("build_graph: alpha must be > 0");
  std::uint32_t n_crit = opts.n_criteria_use == 0 ? train.n_criteria_plus1
                                                  : opts.n_criteria_use;
  if (n_crit > train.n_criteria_plus1)
    throw std::invalid_argument("build_graph: n_criteria_use exceeds declared criteria");
  if (train.total_positives() == 0)
    throw std::invalid_argument("build_graph: no positive interactions");

  McExpansionGraph g;
  g.layout.n_users = train.n_users();
  g.layout.n_items = train.n_items();
  g.layout.n_criteria_plus1 = n_crit;

  for (std::uint32_t c = 0; c < n_crit; ++c) {
    const auto& ps = train.positives[c];
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const auto& [u, i] = ps[k];
      double w = 1.0;
      if (opts.use_rating_weights && train.weights) w = (*train.weights)[c][k];
      if (c == 0) w *= opts.alpha;
      if (w <= 0.0) throw std::invalid_argument("build_graph: non-positive edge weight");
      g.edge_user.push_back(u);
      g.edge_node.push_back(g.layout.criterion_item_node(i, c));
      g.edge_weight.push_back(w);
    }
  }

  g.weighted_degree.assign(g.layout.node_count(), 0.0);
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    g.weighted_degree[g.edge_user[e]] += g.edge_weight[e];
    g.weighted_degree[g.edge_node[e]] += g.edge_weight[e];
  }
  return g;
}

NormalizedAdjacency normalize(const McExpansionGraph& g) {
  NormalizedAdjacency adj;
  adj.n_nodes = g.layout.node_count();
  adj.row_ptr.assign(adj.n_nodes + 1, 0);

  // Both directions of every edge.
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    adj.row_ptr[g.edge_user[e] + 1]++;
    adj.row_ptr[g.edge_node[e] + 1]++;
  }
  for (std::uint64_t v = 0; v < adj.n_nodes; ++v) adj.row_ptr[v + 1] += adj.row_ptr[v];

  adj.col.resize(2 * g.n_edges());
  adj.coef.resize(2 * g.n_edges());
  std::vector<std::uint64_t> cursor(adj.row_ptr.begin(), adj.row_ptr.end() - 1);
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    const std::uint32_t u = g.edge_user[e];
    const std::uint32_t v = g.edge_node[e];
    const double c =
        g.edge_weight[e] / (std::sqrt(g.weighted_degree[u]) * std::sqrt(g.weighted_degree[v]));
    adj.col[cursor[u]] = v;
    adj.coef[cursor[u]++] = c;
    adj.col[cursor[v]] = u;
    adj.coef[cursor[v]++] = c;
  }

  // Sort each row by column for reproducible accumulation order.
  for (std::uint64_t v = 0; v < adj.n_nodes; ++v) {
    const std::uint64_t lo = adj.row_ptr[v], hi = adj.row_ptr[v + 1];
    std::vector<std::pair<std::uint32_t, double>> row;
    row.reserve(hi - lo);
    for (std::uint64_t e = lo; e < hi; ++e) row.emplace_back(adj.col[e], adj.coef[e]);
    std::sort(row.begin(), row.end());
    for (std::uint64_t e = lo; e < hi; ++e) {
      adj.col[e] = row[e - lo].first;
      adj.coef[e] = row[e - lo].second;
    }
  }
  return adj;
}

void export_graph(const McExpansionGraph& g, const std::filesystem::path& edges_tsv,
                  const std::filesystem::path& header_json) {
  std::ofstream out(edges_tsv);
  if (!out) throw std::runtime_error("cannot write " + edges_tsv.string());
  for (std::size_t e = 0; e < g.n_edges(); ++e)
    out << g.edge_user[e] << '\t' << g.edge_node[e] << '\t' << g.edge_weight[e] << '\n';

  nlohmann::json j = {{"n_users", g.layout.n_users},
                      {"n_items", g.layout.n_items},
                      {"C", g.layout.n_criteria_plus1 - 1}};
  std::ofstream hdr(header_json);
  if (!hdr) throw std::runtime_error("cannot write " + header_json.string());
  hdr << j.dump() << "\n";
}

std::vector<std::vector<std::uint32_t>> user_adjacency(const McExpansionGraph& g) {
  std::vector<std::vector<std::uint32_t>> adj(g.layout.n_users);
  for (std::size_t e = 0; e < g.n_edges(); ++e) adj[g.edge_user[e]].push_back(g.edge_node[e]);
  for (auto& v : adj) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return adj;
}

}  // namespace mcrec
