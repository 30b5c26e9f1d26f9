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

#include "mcrec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mcrec {

SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "L" || s == "layers") return SweepParameter::Layers;
  if (s == "d" || s == "dim") return SweepParameter::Dim;
  if (s == "alpha") return SweepParameter::Alpha;
  if (s == "n_criteria" || s == "criteria") return SweepParameter::NCriteria;
  throw std::invalid_argument("unknown sweep parameter: " + s);
}

namespace {

InteractionSet restrict_criteria(const InteractionSet& iset, std::uint32_t keep) {
  InteractionSet out = iset;
  out.n_criteria_plus1 = keep;
  out.positives.resize(keep);
  if (out.weights) out.weights->resize(keep);
  return out;
}

}  // namespace

std::vector<SweepRow> sweep(const TrainConfig& base, SweepParameter param,
                            const std::vector<double>& values, const SplitResult& splits) {
  if (values.empty()) throw std::invalid_argument("sweep: empty value list");
  std::vector<SweepRow> rows;
  for (double value : values) {
    TrainConfig cfg = base;
    const SplitResult* use = &splits;
    SplitResult restricted;
    switch (param) {
      case SweepParameter::Layers:
        cfg.layers = static_cast<std::uint32_t>(value);
        break;
      case SweepParameter::Dim:
        cfg.dim = static_cast<std::uint32_t>(value);
        break;
      case SweepParameter::Alpha:
        cfg.alpha = value;
        break;
      case SweepParameter::NCriteria: {
        const std::uint32_t keep = static_cast<std::uint32_t>(value);
        if (keep < 1 || keep > splits.train.n_criteria_plus1)
          throw std::invalid_argument("sweep: criteria count out of range");
        restricted.train = restrict_criteria(splits.train, keep);
        restricted.valid = restrict_criteria(splits.valid, keep);
        restricted.test = restrict_criteria(splits.test, keep);
        use = &restricted;
        break;
      }
    }
    cfg.validate();
    TrainResult tr = train(use->train, use->valid, cfg);

    ForwardOptions opts;
    opts.layers = cfg.layers;
    opts.scale = cfg.scale;
    opts.pairnorm = cfg.pairnorm && cfg.variant.f;
    opts.pairnorm_layer0 = cfg.pairnorm_layer0;
    opts.keep_layers = false;
    ForwardTrace trace = forward(tr.adj, tr.layout, tr.state, opts);
    EvalOptions eo;
    eo.k_values = {10};
    RankingMetrics m =
        rank_and_score(trace, use->train, &use->valid, use->test, eo);

    SweepRow row;
    row.value = value;
    row.test_ndcg10 = m.ndcg.at(10);
    row.val_ndcg10 = tr.best_val_ndcg10;
    rows.push_back(row);
  }
  return rows;
}

std::vector<BenchRow> bench_linear_scaling(const BenchOptions& opts) {
  if (opts.sizes.empty()) throw std::invalid_argument("bench: no sizes");
  for (std::size_t i = 1; i < opts.sizes.size(); ++i)
    if (opts.sizes[i] <= opts.sizes[i - 1])
      throw std::invalid_argument("bench: sizes must be strictly increasing");

  std::vector<BenchRow> rows;
  for (std::uint64_t target : opts.sizes) {
    // Size the planted generator so the expansion graph lands near the
    // target edge count: roughly 1.6 positives per rated pair, ~50 rated
    // items per user, items kept at a quarter of the user count.
    SyntheticOptions so;
    so.n_criteria = 3;
    so.noise = 0.3;
    so.seed = opts.config.seed;
    const double rated = static_cast<double>(target) / 1.6;
    so.n_users = static_cast<std::uint32_t>(std::max<double>(60.0, rated / 50.0));
    so.n_items = std::max<std::uint32_t>(40, so.n_users / 4);
    const double per_user = rated / static_cast<double>(so.n_users);
    so.density = std::min(1.0, per_user / static_cast<double>(so.n_items));

    RatingLog log = generate_synthetic(so);
    InteractionSet iset = binarize(log, synthetic_specs(so.n_criteria));

    TrainConfig cfg = opts.config;
    cfg.max_epochs = opts.epochs_per_size;
    cfg.patience = opts.epochs_per_size;  // no early stop (and no validation)

    InteractionSet empty_valid;
    empty_valid.users = iset.users;
    empty_valid.items = iset.items;
    empty_valid.n_criteria_plus1 = iset.n_criteria_plus1;
    empty_valid.positives.assign(iset.n_criteria_plus1, {});

    TrainResult tr = train(iset, empty_valid, cfg);

    std::vector<double> secs;
    for (const auto& r : tr.log) secs.push_back(r.seconds);
    std::sort(secs.begin(), secs.end());

    BenchRow row;
    row.target_edges = target;
    row.realized_edges = tr.graph.n_edges();
    row.nodes = tr.layout.node_count();
    row.seconds_per_epoch = secs[secs.size() / 2];
    rows.push_back(row);
  }
  return rows;
}

double bench_r_squared(const std::vector<BenchRow>& rows) {
  const std::size_t n = rows.size();
  if (n < 2) return 1.0;
  double sx = 0, sy = 0;
  for (const auto& r : rows) {
    sx += static_cast<double>(r.realized_edges);
    sy += r.seconds_per_epoch;
  }
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& r : rows) {
    const double dx = static_cast<double>(r.realized_edges) - mx;
    const double dy = r.seconds_per_epoch - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (syy == 0.0) return 1.0;
  const double b = sxy / sxx;
  double ss_res = 0;
  for (const auto& r : rows) {
    const double pred = my + b * (static_cast<double>(r.realized_edges) - mx);
    const double e = r.seconds_per_epoch - pred;
    ss_res += e * e;
  }
  return 1.0 - ss_res / syy;
}

void save_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "target_edges,realized_edges,nodes,seconds_per_epoch\n";
  for (const auto& r : rows)
    out << r.target_edges << ',' << r.realized_edges << ',' << r.nodes << ','
        << r.seconds_per_epoch << '\n';
}

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << parameter << ",val_ndcg10,test_ndcg10\n";
  for (const auto& r : rows)
    out << r.value << ',' << r.val_ndcg10 << ',' << r.test_ndcg10 << '\n';
}

}  // namespace mcrec
