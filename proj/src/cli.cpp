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

#include "mcrec/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcrec/baselines.hpp"
#include "mcrec/checkpoint.hpp"
#include "mcrec/dataset.hpp"
#include "mcrec/evaluation.hpp"
#include "mcrec/experiments.hpp"
#include "mcrec/graph.hpp"
#include "mcrec/kernels.hpp"
#include "mcrec/log.hpp"
#include "mcrec/model.hpp"
#include "mcrec/training.hpp"

namespace mcrec {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// --- manifest ------------------------------------------------------------------

std::uint64_t file_hash(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 15];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

struct ManifestBuilder {
  std::string command;
  json config = json::object();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;

  void write(const fs::path& out_dir) const {
    json j;
    j["command"] = command;
    j["config"] = config;
    json in = json::array();
    for (const auto& p : inputs)
      in.push_back({{"path", p.string()}, {"fnv1a64", file_hash(p)}});
    j["inputs"] = in;
    json out = json::array();
    for (const auto& p : outputs) out.push_back(p.string());
    j["outputs"] = out;
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    std::ofstream f(out_dir / "manifest.json");
    if (!f) throw std::runtime_error("cannot write manifest in " + out_dir.string());
    f << j.dump(2) << "\n";
  }
};

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// --- split artifacts --------------------------------------------------------------

struct DataDir {
  InteractionSet train, valid, test;
  std::vector<std::string> users, items;
  std::uint32_t n_criteria_plus1 = 1;
};

DataDir load_data_dir(const fs::path& dir) {
  DataDir d;
  load_vocab(dir / "vocab.json", d.users, d.items, d.n_criteria_plus1);
  d.train = load_interactions_tsv(dir / "train.tsv", d.users, d.items, d.n_criteria_plus1);
  d.valid = load_interactions_tsv(dir / "valid.tsv", d.users, d.items, d.n_criteria_plus1);
  d.test = load_interactions_tsv(dir / "test.tsv", d.users, d.items, d.n_criteria_plus1);
  return d;
}

void save_split_dir(const SplitResult& splits, const fs::path& dir,
                    ManifestBuilder& manifest) {
  save_interactions_tsv(splits.train, dir / "train.tsv");
  save_interactions_tsv(splits.valid, dir / "valid.tsv");
  save_interactions_tsv(splits.test, dir / "test.tsv");
  save_vocab(splits.train, dir / "vocab.json");
  manifest.outputs.insert(manifest.outputs.end(),
                          {dir / "train.tsv", dir / "valid.tsv", dir / "test.tsv",
                           dir / "vocab.json"});
}

// --- shared helpers ---------------------------------------------------------------

std::vector<std::uint32_t> parse_k_list(const std::string& ks) {
  std::vector<std::uint32_t> out;
  std::size_t start = 0;
  while (start < ks.size()) {
    std::size_t end = ks.find(',', start);
    if (end == std::string::npos) end = ks.size();
    out.push_back(static_cast<std::uint32_t>(std::stoul(ks.substr(start, end - start))));
    start = end + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty K list");
  return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string nearest_ids(const std::string& id, const std::vector<std::string>& known,
                        std::size_t count = 3) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& k : known) scored.emplace_back(levenshtein(id, k), k);
  std::sort(scored.begin(), scored.end());
  std::string out;
  for (std::size_t i = 0; i < std::min(count, scored.size()); ++i) {
    if (i > 0) out += ", ";
    out += scored[i].second;
  }
  return out;
}

ForwardOptions forward_options_from_config(const TrainConfig& cfg) {
  ForwardOptions opts;
  opts.layers = cfg.layers;
  opts.scale = cfg.scale;
  opts.pairnorm = cfg.pairnorm && cfg.variant.f;
  opts.pairnorm_layer0 = cfg.pairnorm_layer0;
  opts.keep_layers = false;
  return opts;
}

json metrics_to_json(const RankingMetrics& m) {
  json j;
  for (const auto& [k, v] : m.precision) j["precision"][std::to_string(k)] = v;
  for (const auto& [k, v] : m.recall) j["recall"][std::to_string(k)] = v;
  for (const auto& [k, v] : m.ndcg) j["ndcg"][std::to_string(k)] = v;
  return j;
}

void save_metrics(const RankingMetrics& m, const std::string& method, const fs::path& dir,
                  ManifestBuilder& manifest) {
  json j;
  j["method"] = method;
  j["n_users_evaluated"] = m.n_users_evaluated;
  j["metrics"] = metrics_to_json(m);
  {
    std::ofstream f(dir / "metrics.json");
    if (!f) throw std::runtime_error("cannot write metrics.json");
    f << j.dump(2) << "\n";
  }
  {
    std::ofstream f(dir / "metrics.csv");
    if (!f) throw std::runtime_error("cannot write metrics.csv");
    f << "method,metric,K,value\n";
    for (const auto& [k, v] : m.precision) f << method << ",precision," << k << ',' << v << '\n';
    for (const auto& [k, v] : m.recall) f << method << ",recall," << k << ',' << v << '\n';
    for (const auto& [k, v] : m.ndcg) f << method << ",ndcg," << k << ',' << v << '\n';
  }
  manifest.outputs.insert(manifest.outputs.end(), {dir / "metrics.json", dir / "metrics.csv"});
}

// Scorer for a checkpoint against a data dir (rebuilds the training graph).
struct LoadedModel {
  Checkpoint ck;
  TrainConfig cfg;
  // cpa-lgc / lightgcn
  McExpansionGraph graph;
  NormalizedAdjacency adj;
  ForwardTrace trace;
  // lightgcn_mc
  LightGcnMcModel mc_model;
  std::vector<Matrix> mc_segments;
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
};

LoadedModel load_model(const fs::path& ckpt_path, const DataDir& data) {
  LoadedModel lm;
  lm.ck = load_checkpoint(ckpt_path);
  lm.cfg = train_config_from_json(lm.ck.config_echo);
  lm.n_users = data.train.n_users();
  lm.n_items = data.train.n_items();
  if (lm.ck.users != data.train.users || lm.ck.items != data.train.items)
    throw std::runtime_error("checkpoint vocabulary does not match the data directory");

  if (lm.ck.kind == "lightgcn_mc") {
    lm.mc_model = init_lightgcn_mc(data.train, lm.cfg);
    if (lm.mc_model.e0.size() != lm.ck.segment_tables.size())
      throw std::runtime_error("checkpoint segment count mismatch");
    lm.mc_model.e0 = lm.ck.segment_tables;
    lm.mc_segments = lightgcn_mc_forward(lm.mc_model);
  } else {
    BuildGraphOptions gopts;
    gopts.alpha = lm.cfg.alpha;
    gopts.n_criteria_use = lm.cfg.variant.mc_graph ? 0 : 1;
    gopts.use_rating_weights = lm.cfg.use_rating_weights;
    lm.graph = build_graph(data.train, gopts);
    if (lm.graph.layout.node_count() != lm.ck.state.e0.rows())
      throw std::runtime_error("checkpoint table shape does not match the rebuilt graph");
    lm.adj = normalize(lm.graph);
    lm.trace =
        forward(lm.adj, lm.graph.layout, lm.ck.state, forward_options_from_config(lm.cfg));
  }
  return lm;
}

ItemScorer scorer_of(const LoadedModel& lm) {
  if (lm.ck.kind == "lightgcn_mc") {
    const auto* segs = &lm.mc_segments;
    const std::uint32_t nu = lm.n_users, ni = lm.n_items;
    return [segs, nu, ni](std::uint32_t u) {
      return lightgcn_mc_score_all(*segs, nu, ni, u);
    };
  }
  const Matrix* z = &lm.trace.final_z;
  const GraphLayout layout = lm.trace.layout;
  return [z, layout](std::uint32_t u) { return score_all_items(*z, layout, u); };
}

std::string method_label(const LoadedModel& lm) {
  if (lm.ck.kind == "lightgcn") return "LightGCN";
  if (lm.ck.kind == "lightgcn_mc") return "LightGCN_MC";
  return variant_label(lm.cfg.variant);
}

// --- commands ----------------------------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& specs_path,
               const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  auto specs = load_criterion_specs(specs_path);
  RatingLog log = ingest(input, specs);
  auto counts = records_per_criterion(log);

  json rep;
  rep["n_records"] = log.records.size();
  rep["n_criteria_plus1"] = log.n_criteria_plus1;
  json per = json::object();
  for (std::uint32_t c = 0; c < counts.size(); ++c) per[std::to_string(c)] = counts[c];
  rep["records_per_criterion"] = per;
  if (!log.records.empty()) {
    DatasetStats st = log_stats(log);
    rep["stats"] = {{"n_users", st.n_users},
                    {"n_items", st.n_items},
                    {"n_overall_ratings", st.n_overall_ratings},
                    {"n_mc_ratings", st.n_mc_ratings},
                    {"gamma", st.gamma}};
  }
  std::ofstream f(dir / "ingest_report.json");
  f << rep.dump(2) << "\n";
  std::cout << rep.dump(2) << "\n";

  ManifestBuilder mb;
  mb.command = "ingest";
  mb.inputs = {input, specs_path};
  mb.outputs = {dir / "ingest_report.json"};
  mb.write(dir);
  return 0;
}

int cmd_synth(const SyntheticOptions& so, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  RatingLog log = generate_synthetic(so);
  save_rating_log_tsv(log, dir / "ratings.tsv");
  save_criterion_specs(synthetic_specs(so.n_criteria), dir / "specs.json");

  ManifestBuilder mb;
  mb.command = "synth";
  mb.config = {{"n_users", so.n_users},   {"n_items", so.n_items},
               {"n_criteria", so.n_criteria}, {"density", so.density},
               {"noise", so.noise},       {"rate_prob", so.rate_prob},
               {"seed", so.seed}};
  mb.outputs = {dir / "ratings.tsv", dir / "specs.json"};
  mb.write(dir);
  log::info("synth: wrote " + std::to_string(log.records.size()) + " records");
  return 0;
}

int cmd_split(const std::string& input, const std::string& specs_path, const SplitRatios& ratios,
              std::uint32_t min_interactions, std::uint64_t seed, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  auto specs = load_criterion_specs(specs_path);
  RatingLog log = ingest(input, specs);
  InteractionSet iset = binarize(log, specs);
  if (min_interactions > 1) iset = filter_min_interactions(iset, min_interactions);
  SplitResult splits = split(iset, ratios, seed);

  ManifestBuilder mb;
  mb.command = "split";
  mb.inputs = {input, specs_path};
  save_split_dir(splits, dir, mb);

  json st;
  DatasetStats ls = log_stats(log);
  st["log"] = {{"n_users", ls.n_users},
               {"n_items", ls.n_items},
               {"n_overall_ratings", ls.n_overall_ratings},
               {"n_mc_ratings", ls.n_mc_ratings},
               {"gamma", ls.gamma}};
  DatasetStats is = stats(iset);
  st["interactions"] = {{"n_users", is.n_users},
                        {"n_items", is.n_items},
                        {"n_overall_positives", is.n_overall_ratings},
                        {"n_mc_positives", is.n_mc_ratings},
                        {"gamma", is.gamma}};
  st["splits"] = {{"train_overall", splits.train.positives[0].size()},
                  {"valid_overall", splits.valid.positives[0].size()},
                  {"test_overall", splits.test.positives[0].size()},
                  {"train_total", splits.train.total_positives()}};
  std::ofstream f(dir / "stats.json");
  f << st.dump(2) << "\n";
  mb.outputs.push_back(dir / "stats.json");

  mb.config = {{"ratios", {ratios.train, ratios.valid, ratios.test}},
               {"min_interactions", min_interactions},
               {"seed", seed}};
  mb.write(dir);
  std::cout << st.dump(2) << "\n";
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& raw, const std::string& specs_path,
              const SplitRatios& ratios, std::uint32_t min_interactions,
              const TrainConfig& cfg0, const std::string& baseline, std::uint32_t repeats,
              const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  ManifestBuilder mb;
  mb.command = "train";
  mb.config = train_config_to_json(cfg0);
  mb.config["baseline"] = baseline;
  mb.config["repeats"] = repeats;

  struct RepeatOutcome {
    double test_ndcg10 = std::numeric_limits<double>::quiet_NaN();
    double val_ndcg10 = std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<RepeatOutcome> outcomes;

  for (std::uint32_t rep = 0; rep < repeats; ++rep) {
    TrainConfig cfg = cfg0;
    cfg.seed = cfg0.seed + rep;

    SplitResult splits;
    if (!raw.empty()) {
      auto specs = load_criterion_specs(specs_path);
      RatingLog log = ingest(raw, specs);
      InteractionSet iset = binarize(log, specs);
      if (min_interactions > 1) iset = filter_min_interactions(iset, min_interactions);
      splits = split(iset, ratios, cfg.seed);
      if (rep == 0) {
        mb.inputs = {raw, specs_path};
      }
    } else {
      DataDir d = load_data_dir(data_dir);
      splits.train = std::move(d.train);
      splits.valid = std::move(d.valid);
      splits.test = std::move(d.test);
      if (rep == 0)
        mb.inputs = {fs::path(data_dir) / "train.tsv", fs::path(data_dir) / "valid.tsv",
                     fs::path(data_dir) / "vocab.json"};
    }

    const std::string suffix = repeats > 1 ? "_r" + std::to_string(rep) : "";
    const fs::path ckpt_path = dir / ("checkpoint" + suffix + ".bin");
    const fs::path log_path = dir / ("trainlog" + suffix + ".csv");

    Checkpoint ck;
    ck.users = splits.train.users;
    ck.items = splits.train.items;
    ck.dim = cfg.dim;
    ck.config_echo = train_config_to_json(cfg);

    RepeatOutcome outcome;
    if (baseline == "lightgcn_mc") {
      LightGcnMcTrainResult tr = train_lightgcn_mc(splits.train, splits.valid, cfg);
      save_train_log(tr.log, log_path);
      ck.kind = "lightgcn_mc";
      ck.layout.n_users = tr.model.n_users;
      ck.layout.n_items = tr.model.n_items;
      ck.layout.n_criteria_plus1 = tr.model.n_criteria_plus1;
      ck.segment_tables = tr.model.e0;
      save_checkpoint(ck, ckpt_path);
      outcome.val_ndcg10 = tr.best_val_ndcg10;
      if (!splits.test.positives[0].empty()) {
        auto segs = lightgcn_mc_forward(tr.model);
        const std::uint32_t nu = tr.model.n_users, ni = tr.model.n_items;
        ItemScorer sc = [&segs, nu, ni](std::uint32_t u) {
          return lightgcn_mc_score_all(segs, nu, ni, u);
        };
        EvalOptions eo;
        eo.k_values = {10};
        outcome.test_ndcg10 =
            rank_and_score(sc, nu, ni, splits.train, &splits.valid, splits.test, eo)
                .ndcg.at(10);
      }
    } else {
      TrainConfig run_cfg = cfg;
      if (baseline == "lightgcn") run_cfg.variant = parse_variant("mc_only+no_cp+no_f");
      TrainResult tr = train(splits.train, splits.valid, run_cfg);
      save_train_log(tr.log, log_path);
      ck.kind = baseline == "lightgcn" ? "lightgcn" : "cpa-lgc";
      ck.layout = tr.layout;
      ck.state = tr.state;
      ck.config_echo = train_config_to_json(run_cfg);
      save_checkpoint(ck, ckpt_path);
      outcome.val_ndcg10 = tr.best_val_ndcg10;
      if (!splits.test.positives[0].empty()) {
        ForwardTrace trace =
            forward(tr.adj, tr.layout, tr.state, forward_options_from_config(run_cfg));
        EvalOptions eo;
        eo.k_values = {10};
        outcome.test_ndcg10 =
            rank_and_score(trace, splits.train, &splits.valid, splits.test, eo).ndcg.at(10);
      }
    }
    outcomes.push_back(outcome);
    mb.outputs.insert(mb.outputs.end(), {ckpt_path, log_path});
    log::info("train repeat " + std::to_string(rep) +
              ": val_ndcg10=" + std::to_string(outcome.val_ndcg10) +
              " test_ndcg10=" + std::to_string(outcome.test_ndcg10));
  }

  // Per-repeat summary with the mean in the last row.
  {
    std::ofstream f(dir / "repeats.csv");
    f << "repeat,seed,val_ndcg10,test_ndcg10\n";
    double sv = 0, st = 0;
    for (std::uint32_t r = 0; r < outcomes.size(); ++r) {
      f << r << ',' << cfg0.seed + r << ',' << outcomes[r].val_ndcg10 << ','
        << outcomes[r].test_ndcg10 << '\n';
      sv += outcomes[r].val_ndcg10;
      st += outcomes[r].test_ndcg10;
    }
    f << "mean," << ',' << sv / outcomes.size() << ',' << st / outcomes.size() << '\n';
    mb.outputs.push_back(dir / "repeats.csv");
  }

  std::ofstream cf(dir / "config.json");
  cf << train_config_to_json(cfg0).dump(2) << "\n";
  mb.outputs.push_back(dir / "config.json");
  mb.write(dir);
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& data_dir, const std::string& ks,
             bool include_valid_candidates, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  DataDir data = load_data_dir(data_dir);
  LoadedModel lm = load_model(ckpt, data);

  EvalOptions eo;
  eo.k_values = parse_k_list(ks);
  RankingMetrics m =
      rank_and_score(scorer_of(lm), lm.n_users, lm.n_items, data.train,
                     include_valid_candidates ? nullptr : &data.valid, data.test, eo);

  ManifestBuilder mb;
  mb.command = "eval";
  mb.inputs = {ckpt, fs::path(data_dir) / "test.tsv"};
  mb.config = {{"k", ks}, {"include_valid_candidates", include_valid_candidates}};
  save_metrics(m, method_label(lm), dir, mb);
  mb.write(dir);

  std::cout << "method=" << method_label(lm);
  for (const auto& [k, v] : m.ndcg) std::cout << " ndcg@" << k << "=" << v;
  std::cout << "\n";
  return 0;
}

int cmd_recommend(const std::string& ckpt, const std::string& data_dir, const std::string& user,
                  std::uint32_t k, const std::string& out) {
  DataDir data = load_data_dir(data_dir);
  LoadedModel lm = load_model(ckpt, data);

  auto it = data.train.user_index.find(user);
  if (it == data.train.user_index.end()) {
    std::cerr << "error: unknown user id '" << user
              << "'; nearest known ids: " << nearest_ids(user, data.train.users) << "\n";
    return 1;
  }
  const std::uint32_t u = it->second;

  std::vector<double> scores = scorer_of(lm)(u);
  std::vector<char> excluded(data.train.n_items(), 0);
  for (const auto& [uu, ii] : data.train.positives[0])
    if (uu == u) excluded[ii] = 1;

  std::vector<std::uint32_t> candidates;
  for (std::uint32_t i = 0; i < data.train.n_items(); ++i)
    if (!excluded[i]) candidates.push_back(i);
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const std::size_t top_n = std::min<std::size_t>(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + top_n, candidates.end(), better);

  json rec;
  rec["user"] = user;
  json items = json::array();
  for (std::size_t r = 0; r < top_n; ++r) {
    std::cout << (r + 1) << "\t" << data.train.items[candidates[r]] << "\t"
              << scores[candidates[r]] << "\n";
    items.push_back(
        {{"rank", r + 1}, {"item", data.train.items[candidates[r]]},
         {"score", scores[candidates[r]]}});
  }
  rec["items"] = items;

  if (!out.empty()) {
    const fs::path dir = ensure_out_dir(out);
    std::ofstream f(dir / "recommendations.json");
    f << rec.dump(2) << "\n";
    ManifestBuilder mb;
    mb.command = "recommend";
    mb.inputs = {ckpt};
    mb.config = {{"user", user}, {"k", k}};
    mb.outputs = {dir / "recommendations.json"};
    mb.write(dir);
  }
  return 0;
}

int cmd_bench(const std::string& sizes_csv, std::uint32_t epochs, const TrainConfig& cfg,
              const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  BenchOptions bo;
  bo.config = cfg;
  bo.epochs_per_size = epochs;
  for (std::uint32_t v : parse_k_list(sizes_csv)) bo.sizes.push_back(v);

  auto rows = bench_linear_scaling(bo);
  save_bench_csv(rows, dir / "scaling.csv");

  std::cout << "edges\tnodes\tsec_per_epoch\tratio\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::cout << rows[i].realized_edges << '\t' << rows[i].nodes << '\t'
              << rows[i].seconds_per_epoch << '\t';
    if (i > 0)
      std::cout << rows[i].seconds_per_epoch / rows[i - 1].seconds_per_epoch;
    std::cout << "\n";
  }
  std::cout << "r_squared=" << bench_r_squared(rows) << "\n";

  ManifestBuilder mb;
  mb.command = "bench";
  mb.config = {{"sizes", sizes_csv}, {"epochs", epochs}};
  mb.config.update(train_config_to_json(cfg));
  mb.outputs = {dir / "scaling.csv"};
  mb.write(dir);
  return 0;
}

int cmd_diagnose(const std::string& data_dir, const std::string& ckpt, const TrainConfig& cfg,
                 const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  DataDir data = load_data_dir(data_dir);

  BuildGraphOptions gopts;
  gopts.alpha = cfg.alpha;
  gopts.n_criteria_use = cfg.variant.mc_graph ? 0 : 1;
  McExpansionGraph g = build_graph(data.train, gopts);
  NormalizedAdjacency adj = normalize(g);

  EmbeddingState state;
  if (!ckpt.empty()) {
    Checkpoint ck = load_checkpoint(ckpt);
    if (ck.state.e0.rows() != g.layout.node_count())
      throw std::runtime_error("checkpoint does not match the data directory graph");
    state = ck.state;
  } else {
    state = init_embeddings(g.layout, cfg.dim, cfg.seed, cfg.variant.cp);
  }

  ForwardOptions fo = forward_options_from_config(cfg);
  fo.keep_layers = true;
  ForwardTrace trace = forward(adj, g.layout, state, fo);

  SmoothnessOptions so;
  so.seed = cfg.seed;
  SmoothnessReport rep = smoothness_report(trace, so);
  save_smoothness_csv(rep, dir / "smoothness.csv", dir / "smoothness_hist.csv");

  std::cout << "layer,mean_distance\n";
  for (std::size_t l = 0; l < rep.mean_distance.size(); ++l)
    std::cout << l << ',' << rep.mean_distance[l] << "\n";

  ManifestBuilder mb;
  mb.command = "diagnose";
  mb.inputs = {fs::path(data_dir) / "train.tsv"};
  if (!ckpt.empty()) mb.inputs.push_back(ckpt);
  mb.config = train_config_to_json(cfg);
  mb.outputs = {dir / "smoothness.csv", dir / "smoothness_hist.csv"};
  mb.write(dir);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"multi-criteria graph recommender"};
  app.require_subcommand(1);

  // Shared train-config options, attached to several subcommands.
  std::string config_path;
  std::string variant_text;
  std::string pairnorm_text;
  TrainConfig cfg;
  auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_option("--seed", cfg.seed, "root seed");
    sub->add_option("--threads", cfg.threads, "worker threads (1 = bitwise deterministic)");
    sub->add_option("--variant", variant_text, "full | mc_only | no_cp | no_f (combine with +)");
    sub->add_option("--pairnorm", pairnorm_text, "on|off");
    sub->add_option("--alpha", cfg.alpha, "overall-edge weight");
    sub->add_option("--layers", cfg.layers, "propagation layers L");
    sub->add_option("--dim", cfg.dim, "embedding dimension d");
    sub->add_option("--lr", cfg.lr, "learning rate");
    sub->add_option("--lambda", cfg.lambda, "L2 strength");
    sub->add_option("--scale", cfg.scale, "normalizer scale s");
    sub->add_option("--batch-size", cfg.batch_size, "triples per batch");
    sub->add_option("--epochs", cfg.max_epochs, "epoch cap");
    sub->add_option("--patience", cfg.patience, "early-stop patience");
  };
  auto finalize_config = [&](CLI::App* sub) {
    TrainConfig merged;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw std::runtime_error("cannot open config: " + config_path);
      merged = train_config_from_json(json::parse(f));
    }
    auto override_if = [&](const char* flag, auto member_ptr) {
      if (sub->count(flag) > 0) merged.*member_ptr = cfg.*member_ptr;
    };
    override_if("--seed", &TrainConfig::seed);
    override_if("--threads", &TrainConfig::threads);
    override_if("--alpha", &TrainConfig::alpha);
    override_if("--layers", &TrainConfig::layers);
    override_if("--dim", &TrainConfig::dim);
    override_if("--lr", &TrainConfig::lr);
    override_if("--lambda", &TrainConfig::lambda);
    override_if("--scale", &TrainConfig::scale);
    override_if("--batch-size", &TrainConfig::batch_size);
    override_if("--epochs", &TrainConfig::max_epochs);
    override_if("--patience", &TrainConfig::patience);
    if (sub->count("--variant") > 0) merged.variant = parse_variant(variant_text);
    if (sub->count("--pairnorm") > 0) {
      if (pairnorm_text != "on" && pairnorm_text != "off")
        throw std::runtime_error("--pairnorm expects on|off");
      merged.pairnorm = pairnorm_text == "on";
    }
    merged.validate();
    return merged;
  };

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "validate a rating file and report counts");
  std::string in_input, in_specs, in_out = "out";
  ingest_cmd->add_option("--input", in_input, "rating TSV")->required();
  ingest_cmd->add_option("--specs", in_specs, "criterion spec JSON")->required();
  ingest_cmd->add_option("--out", in_out, "output directory");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a planted-preference rating log");
  SyntheticOptions so;
  std::string sy_out = "out";
  synth_cmd->add_option("--users", so.n_users, "user count");
  synth_cmd->add_option("--items", so.n_items, "item count");
  synth_cmd->add_option("--criteria", so.n_criteria, "criterion count C (overall excluded)");
  synth_cmd->add_option("--density", so.density, "fraction of the catalog each user rates");
  synth_cmd->add_option("--noise", so.noise, "overall-rating noise level");
  synth_cmd->add_option("--rate-prob", so.rate_prob, "probability a side criterion is rated");
  synth_cmd->add_option("--seed", so.seed, "seed");
  synth_cmd->add_option("--out", sy_out, "output directory");

  // split
  auto* split_cmd = app.add_subcommand("split", "binarize, filter and split a rating log");
  std::string sp_input, sp_specs, sp_ratios = "0.7,0.1,0.2", sp_out = "out";
  std::uint32_t sp_min = 5;
  std::uint64_t sp_seed = 0;
  split_cmd->add_option("--input", sp_input, "rating TSV")->required();
  split_cmd->add_option("--specs", sp_specs, "criterion spec JSON")->required();
  split_cmd->add_option("--ratios", sp_ratios, "train,valid,test");
  split_cmd->add_option("--min-interactions", sp_min, "drop users/items below this");
  split_cmd->add_option("--seed", sp_seed, "split seed");
  split_cmd->add_option("--out", sp_out, "output directory");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model on a split");
  std::string tr_data, tr_raw, tr_specs, tr_baseline, tr_out = "out";
  std::string tr_ratios = "0.7,0.1,0.2";
  std::uint32_t tr_min = 5, tr_repeats = 1;
  train_cmd->add_option("--data", tr_data, "split directory (from `split`)");
  train_cmd->add_option("--raw", tr_raw, "raw rating TSV (split per repeat)");
  train_cmd->add_option("--specs", tr_specs, "criterion spec JSON (with --raw)");
  train_cmd->add_option("--ratios", tr_ratios, "train,valid,test (with --raw)");
  train_cmd->add_option("--min-interactions", tr_min, "filter threshold (with --raw)");
  train_cmd->add_option("--baseline", tr_baseline, "lightgcn | lightgcn_mc");
  train_cmd->add_option("--repeats", tr_repeats, "independent seeds");
  train_cmd->add_option("--out", tr_out, "output directory");
  add_config_flags(train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "ranking metrics of a checkpoint");
  std::string ev_ckpt, ev_data, ev_k = "5,10", ev_out = "out";
  bool ev_include_valid = false;
  eval_cmd->add_option("--checkpoint", ev_ckpt, "checkpoint file")->required();
  eval_cmd->add_option("--data", ev_data, "split directory")->required();
  eval_cmd->add_option("--k", ev_k, "comma-separated K values");
  eval_cmd->add_flag("--include-valid-candidates", ev_include_valid,
                     "keep validation items in the candidate pool");
  eval_cmd->add_option("--out", ev_out, "output directory");

  // recommend
  auto* rec_cmd = app.add_subcommand("recommend", "top-K items for a user");
  std::string rc_ckpt, rc_data, rc_user, rc_out;
  std::uint32_t rc_k = 10;
  rec_cmd->add_option("--checkpoint", rc_ckpt, "checkpoint file")->required();
  rec_cmd->add_option("--data", rc_data, "split directory")->required();
  rec_cmd->add_option("--user", rc_user, "user id")->required();
  rec_cmd->add_option("--k", rc_k, "list length");
  rec_cmd->add_option("--out", rc_out, "optional output directory");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "per-epoch runtime scaling");
  std::string bn_sizes = "10000,100000,1000000", bn_out = "out";
  std::uint32_t bn_epochs = 3;
  bench_cmd->add_option("--sizes", bn_sizes, "target edge counts, increasing");
  bench_cmd->add_option("--bench-epochs", bn_epochs, "epochs per size (median)");
  bench_cmd->add_option("--out", bn_out, "output directory");
  add_config_flags(bench_cmd);

  // diagnose
  auto* diag_cmd = app.add_subcommand("diagnose", "layer-wise smoothness report");
  std::string dg_data, dg_ckpt, dg_out = "out";
  diag_cmd->add_option("--data", dg_data, "split directory")->required();
  diag_cmd->add_option("--checkpoint", dg_ckpt, "optional checkpoint");
  diag_cmd->add_option("--out", dg_out, "output directory");
  add_config_flags(diag_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(in_input, in_specs, in_out);
    if (synth_cmd->parsed()) return cmd_synth(so, sy_out);
    if (split_cmd->parsed()) {
      SplitRatios r;
      if (std::sscanf(sp_ratios.c_str(), "%lf,%lf,%lf", &r.train, &r.valid, &r.test) != 3)
        throw std::runtime_error("--ratios expects train,valid,test");
      return cmd_split(sp_input, sp_specs, r, sp_min, sp_seed, sp_out);
    }
    if (train_cmd->parsed()) {
      TrainConfig merged = finalize_config(train_cmd);
      kernels::set_num_threads(merged.threads);
      SplitRatios r;
      std::sscanf(tr_ratios.c_str(), "%lf,%lf,%lf", &r.train, &r.valid, &r.test);
      if (tr_data.empty() && tr_raw.empty())
        throw std::runtime_error("train: need --data or --raw");
      if (!tr_baseline.empty()) baseline_kind_from_string(tr_baseline);  // validate
      return cmd_train(tr_data, tr_raw, tr_specs, r, tr_min, merged, tr_baseline, tr_repeats,
                       tr_out);
    }
    if (eval_cmd->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_k, ev_include_valid, ev_out);
    if (rec_cmd->parsed()) return cmd_recommend(rc_ckpt, rc_data, rc_user, rc_k, rc_out);
    if (bench_cmd->parsed()) {
      TrainConfig merged = finalize_config(bench_cmd);
      return cmd_bench(bn_sizes, bn_epochs, merged, bn_out);
    }
    if (diag_cmd->parsed()) {
      TrainConfig merged = finalize_config(diag_cmd);
      kernels::set_num_threads(merged.threads);
      return cmd_diagnose(dg_data, dg_ckpt, merged, dg_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mcrec
