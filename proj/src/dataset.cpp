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

#include "mcrec/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mcrec/rng.hpp"

namespace mcrec {

using nlohmann::json;

double CriterionSpec::positive_cutoff() const {
  switch (rule) {
    case PositiveRule::MedianOfRange:
      return 0.5 * (scale_min + scale_max);
    case PositiveRule::AtLeastOne:
      return 1.0;
    case PositiveRule::FixedThreshold:
      return threshold;
  }
  return 0.0;
}

void CriterionSpec::validate() const {
  if (!(scale_min < scale_max))
    throw std::invalid_argument("criterion " + std::to_string(criterion) +
                                ": scale_min must be < scale_max");
  if (rule == PositiveRule::FixedThreshold &&
      (threshold < scale_min || threshold > scale_max))
    throw std::invalid_argument("criterion " + std::to_string(criterion) +
                                ": fixed threshold outside rating scale");
}

std::uint64_t InteractionSet::total_positives() const {
  std::uint64_t n = 0;
  for (const auto& v : positives) n += v.size();
  return n;
}

void InteractionSet::validate() const {
  if (positives.size() != n_criteria_plus1)
    throw std::logic_error("interaction set: positives list count != C+1");
  for (std::uint32_t c = 0; c < n_criteria_plus1; ++c) {
    const auto& ps = positives[c];
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (ps[k].first >= users.size() || ps[k].second >= items.size())
        throw std::logic_error("interaction set: positive index out of range");
      if (k > 0 && !(ps[k - 1] < ps[k]))
        throw std::logic_error("interaction set: positives not sorted/deduped");
    }
    if (weights && (*weights)[c].size() != ps.size())
      throw std::logic_error("interaction set: weights not parallel to positives");
  }
}

// --- criterion specs ------------------------------------------------------

static PositiveRule rule_from_string(const std::string& s) {
  if (s == "median_of_range") return PositiveRule::MedianOfRange;
  if (s == "at_least_one") return PositiveRule::AtLeastOne;
  if (s == "fixed_threshold") return PositiveRule::FixedThreshold;
  throw std::invalid_argument("unknown positive rule: " + s);
}

static std::string rule_to_string(PositiveRule r) {
  switch (r) {
    case PositiveRule::MedianOfRange: return "median_of_range";
    case PositiveRule::AtLeastOne: return "at_least_one";
    case PositiveRule::FixedThreshold: return "fixed_threshold";
  }
  return "?";
}

std::vector<CriterionSpec> load_criterion_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open criterion specs: " + path.string());
  json j = json::parse(in);
  std::vector<CriterionSpec> specs;
  for (const auto& e : j) {
    CriterionSpec s;
    s.criterion = e.at("index").get<std::uint32_t>();
    s.name = e.value("name", "c" + std::to_string(s.criterion));
    s.scale_min = e.at("min").get<double>();
    s.scale_max = e.at("max").get<double>();
    s.rule = rule_from_string(e.value("rule", "median_of_range"));
    if (s.rule == PositiveRule::FixedThreshold) s.threshold = e.at("threshold").get<double>();
    s.validate();
    specs.push_back(std::move(s));
  }
  if (specs.empty()) throw std::invalid_argument("criterion specs file is empty");
  std::sort(specs.begin(), specs.end(),
            [](const auto& a, const auto& b) { return a.criterion < b.criterion; });
  for (std::uint32_t c = 0; c < specs.size(); ++c)
    if (specs[c].criterion != c)
      throw std::invalid_argument("criterion indices must be 0..C without gaps");
  return specs;
}

void save_criterion_specs(const std::vector<CriterionSpec>& specs,
                          const std::filesystem::path& path) {
  json j = json::array();
  for (const auto& s : specs) {
    json e = {{"index", s.criterion}, {"name", s.name},  {"min", s.scale_min},
              {"max", s.scale_max},   {"rule", rule_to_string(s.rule)}};
    if (s.rule == PositiveRule::FixedThreshold) e["threshold"] = s.threshold;
    j.push_back(e);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write criterion specs: " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<CriterionSpec> default_specs(std::uint32_t n_criteria_plus1, double scale_min,
                                         double scale_max) {
  std::vector<CriterionSpec> specs(n_criteria_plus1);
  for (std::uint32_t c = 0; c < n_criteria_plus1; ++c) {
    specs[c].criterion = c;
    specs[c].name = c == 0 ? "overall" : "c" + std::to_string(c);
    specs[c].scale_min = scale_min;
    specs[c].scale_max = scale_max;
  }
  return specs;
}

// --- ingest ----------------------------------------------------------------

RatingLog ingest_records(std::vector<RatingRecord> records,
                         const std::vector<CriterionSpec>& specs) {
  for (const auto& s : specs) s.validate();
  RatingLog log;
  log.n_criteria_plus1 = static_cast<std::uint32_t>(specs.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (r.criterion >= specs.size())
      throw std::invalid_argument("record " + std::to_string(k) + ": criterion " +
                                  std::to_string(r.criterion) + " out of range (C=" +
                                  std::to_string(specs.size() - 1) + ")");
    const auto& sp = specs[r.criterion];
    if (r.value < sp.scale_min || r.value > sp.scale_max)
      throw std::invalid_argument("record " + std::to_string(k) + ": value " +
                                  std::to_string(r.value) + " outside scale of criterion " +
                                  std::to_string(r.criterion));
  }
  log.records = std::move(records);
  return log;
}

RatingLog ingest(const std::filesystem::path& path, const std::vector<CriterionSpec>& specs) {
  for (const auto& s : specs) s.validate();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rating file: " + path.string());

  RatingLog log;
  log.n_criteria_plus1 = static_cast<std::uint32_t>(specs.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    RatingRecord r;
    long long crit = -1;
    if (!(ls >> r.user_id >> r.item_id >> crit >> r.value))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected 'user item criterion value'");
    std::string extra;
    if (ls >> extra)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": trailing tokens after 4 fields");
    if (crit < 0 || crit >= static_cast<long long>(specs.size()))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": criterion " +
                               std::to_string(crit) + " out of range (C=" +
                               std::to_string(specs.size() - 1) + ")");
    r.criterion = static_cast<std::uint32_t>(crit);
    const auto& sp = specs[r.criterion];
    if (r.value < sp.scale_min || r.value > sp.scale_max)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": value " +
                               std::to_string(r.value) + " outside [" +
                               std::to_string(sp.scale_min) + ", " +
                               std::to_string(sp.scale_max) + "]");
    log.records.push_back(std::move(r));
  }
  return log;
}

std::vector<std::uint64_t> records_per_criterion(const RatingLog& log) {
  std::vector<std::uint64_t> counts(log.n_criteria_plus1, 0);
  for (const auto& r : log.records) counts[r.criterion]++;
  return counts;
}

// --- binarize ---------------------------------------------------------------

static InteractionSet binarize_impl(const RatingLog& log,
                                    const std::vector<CriterionSpec>& specs,
                                    InteractionSet iset, bool fixed_vocab) {
  if (log.records.empty() && !fixed_vocab)
    throw std::invalid_argument("binarize: empty rating log");
  if (specs.size() != log.n_criteria_plus1)
    throw std::invalid_argument("binarize: spec count != log criterion count");

  iset.n_criteria_plus1 = log.n_criteria_plus1;
  iset.positives.assign(iset.n_criteria_plus1, {});

  auto user_of = [&](const std::string& id) -> std::uint32_t {
    auto it = iset.user_index.find(id);
    if (it != iset.user_index.end()) return it->second;
    if (fixed_vocab) throw std::invalid_argument("binarize: unknown user id " + id);
    std::uint32_t idx = static_cast<std::uint32_t>(iset.users.size());
    iset.users.push_back(id);
    iset.user_index.emplace(id, idx);
    return idx;
  };
  auto item_of = [&](const std::string& id) -> std::uint32_t {
    auto it = iset.item_index.find(id);
    if (it != iset.item_index.end()) return it->second;
    if (fixed_vocab) throw std::invalid_argument("binarize: unknown item id " + id);
    std::uint32_t idx = static_cast<std::uint32_t>(iset.items.size());
    iset.items.push_back(id);
    iset.item_index.emplace(id, idx);
    return idx;
  };

  for (const auto& r : log.records) {
    std::uint32_t u = user_of(r.user_id);
    std::uint32_t i = item_of(r.item_id);
    if (r.value >= specs[r.criterion].positive_cutoff())
      iset.positives[r.criterion].emplace_back(u, i);
  }
  for (auto& ps : iset.positives) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  }
  return iset;
}

InteractionSet binarize(const RatingLog& log, const std::vector<CriterionSpec>& specs) {
  return binarize_impl(log, specs, InteractionSet{}, false);
}

InteractionSet binarize_with_vocab(const RatingLog& log,
                                   const std::vector<CriterionSpec>& specs,
                                   const std::vector<std::string>& users,
                                   const std::vector<std::string>& items) {
  InteractionSet iset;
  iset.users = users;
  iset.items = items;
  for (std::uint32_t k = 0; k < users.size(); ++k) iset.user_index.emplace(users[k], k);
  for (std::uint32_t k = 0; k < items.size(); ++k) iset.item_index.emplace(items[k], k);
  return binarize_impl(log, specs, std::move(iset), true);
}

// --- filtering ---------------------------------------------------------------

InteractionSet filter_min_interactions(const InteractionSet& iset, std::uint32_t k) {
  if (k < 1) throw std::invalid_argument("filter_min_interactions: k must be >= 1");
  iset.validate();

  std::vector<char> user_alive(iset.users.size(), 1);
  std::vector<char> item_alive(iset.items.size(), 1);

  // Fixed-point loop over overall-criterion degree counts.
  for (;;) {
    std::vector<std::uint32_t> udeg(iset.users.size(), 0), ideg(iset.items.size(), 0);
    for (const auto& [u, i] : iset.positives[0]) {
      if (user_alive[u] && item_alive[i]) {
        udeg[u]++;
        ideg[i]++;
      }
    }
    bool changed = false;
    for (std::size_t u = 0; u < udeg.size(); ++u)
      if (user_alive[u] && udeg[u] < k) {
        user_alive[u] = 0;
        changed = true;
      }
    for (std::size_t i = 0; i < ideg.size(); ++i)
      if (item_alive[i] && ideg[i] < k) {
        item_alive[i] = 0;
        changed = true;
      }
    if (!changed) break;
  }

  InteractionSet out;
  out.n_criteria_plus1 = iset.n_criteria_plus1;
  std::vector<std::uint32_t> umap(iset.users.size(), UINT32_MAX),
      imap(iset.items.size(), UINT32_MAX);
  for (std::size_t u = 0; u < iset.users.size(); ++u)
    if (user_alive[u]) {
      umap[u] = static_cast<std::uint32_t>(out.users.size());
      out.user_index.emplace(iset.users[u], umap[u]);
      out.users.push_back(iset.users[u]);
    }
  for (std::size_t i = 0; i < iset.items.size(); ++i)
    if (item_alive[i]) {
      imap[i] = static_cast<std::uint32_t>(out.items.size());
      out.item_index.emplace(iset.items[i], imap[i]);
      out.items.push_back(iset.items[i]);
    }
  if (out.users.empty() || out.items.empty())
    throw std::runtime_error("filter_min_interactions: nothing left after filtering");

  out.positives.assign(out.n_criteria_plus1, {});
  if (iset.weights) out.weights.emplace(out.n_criteria_plus1);
  for (std::uint32_t c = 0; c < iset.n_criteria_plus1; ++c) {
    for (std::size_t kk = 0; kk < iset.positives[c].size(); ++kk) {
      auto [u, i] = iset.positives[c][kk];
      if (user_alive[u] && item_alive[i]) {
        out.positives[c].emplace_back(umap[u], imap[i]);
        if (iset.weights) (*out.weights)[c].push_back((*iset.weights)[c][kk]);
      }
    }
  }
  return out;
}

// --- split -------------------------------------------------------------------

SplitResult split(const InteractionSet& iset, const SplitRatios& ratios, std::uint64_t seed) {
  iset.validate();
  double sum = ratios.train + ratios.valid + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split: ratios must sum to 1");
  if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0)
    throw std::invalid_argument("split: ratios must be non-negative");

  auto make_empty = [&] {
    InteractionSet s;
    s.users = iset.users;
    s.items = iset.items;
    s.user_index = iset.user_index;
    s.item_index = iset.item_index;
    s.n_criteria_plus1 = iset.n_criteria_plus1;
    s.positives.assign(iset.n_criteria_plus1, {});
    return s;
  };
  SplitResult res{make_empty(), make_empty(), make_empty()};

  // Group overall positives by user.
  std::vector<std::vector<std::uint32_t>> by_user(iset.users.size());
  for (const auto& [u, i] : iset.positives[0]) by_user[u].push_back(i);

  // Overall pair -> which split it landed in (0 train, 1 valid, 2 test).
  std::set<std::pair<std::uint32_t, std::uint32_t>> train_pairs;

  Rng root(seed);
  for (std::uint32_t u = 0; u < by_user.size(); ++u) {
    auto& its = by_user[u];
    if (its.empty()) continue;
    Rng r = root.split("split").split(static_cast<std::uint64_t>(u));
    // Fisher-Yates shuffle, per-user stream.
    for (std::size_t a = its.size(); a > 1; --a) {
      std::size_t b = static_cast<std::size_t>(r.uniform_int(a));
      std::swap(its[a - 1], its[b]);
    }
    std::size_t n = its.size();
    std::size_t n_valid = static_cast<std::size_t>(ratios.valid * static_cast<double>(n));
    std::size_t n_test = static_cast<std::size_t>(ratios.test * static_cast<double>(n));
    std::size_t n_train = n - n_valid - n_test;
    for (std::size_t kidx = 0; kidx < n; ++kidx) {
      std::uint32_t i = its[kidx];
      if (kidx < n_train) {
        res.train.positives[0].emplace_back(u, i);
        train_pairs.emplace(u, i);
      } else if (kidx < n_train + n_valid) {
        res.valid.positives[0].emplace_back(u, i);
      } else {
        res.test.positives[0].emplace_back(u, i);
      }
    }
  }

  // Side criteria ride along with their pair's overall train assignment.
  for (std::uint32_t c = 1; c < iset.n_criteria_plus1; ++c)
    for (const auto& p : iset.positives[c])
      if (train_pairs.count(p)) res.train.positives[c].push_back(p);

  for (auto* s : {&res.train, &res.valid, &res.test})
    for (auto& ps : s->positives) std::sort(ps.begin(), ps.end());
  return res;
}

// --- stats -------------------------------------------------------------------

DatasetStats log_stats(const RatingLog& log) {
  DatasetStats st;
  std::set<std::string> users, items;
  for (const auto& r : log.records) {
    users.insert(r.user_id);
    items.insert(r.item_id);
    if (r.criterion == 0) st.n_overall_ratings++;
    st.n_mc_ratings++;
  }
  if (st.n_overall_ratings == 0)
    throw std::runtime_error("stats: no overall ratings, gamma undefined");
  st.n_users = users.size();
  st.n_items = items.size();
  st.n_criteria = log.n_criteria_plus1 - 1;
  st.gamma = static_cast<double>(st.n_mc_ratings) / static_cast<double>(st.n_overall_ratings);
  return st;
}

DatasetStats stats(const InteractionSet& iset) {
  DatasetStats st;
  st.n_users = iset.users.size();
  st.n_items = iset.items.size();
  st.n_overall_ratings = iset.positives[0].size();
  st.n_mc_ratings = iset.total_positives();
  st.n_criteria = iset.n_criteria_plus1 - 1;
  if (st.n_overall_ratings == 0)
    throw std::runtime_error("stats: no overall positives, gamma undefined");
  st.gamma = static_cast<double>(st.n_mc_ratings) / static_cast<double>(st.n_overall_ratings);
  return st;
}

// --- disk formats -------------------------------------------------------------

void save_interactions_tsv(const InteractionSet& iset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::uint32_t c = 0; c < iset.n_criteria_plus1; ++c)
    for (std::size_t k = 0; k < iset.positives[c].size(); ++k) {
      const auto& [u, i] = iset.positives[c][k];
      double w = iset.weights ? (*iset.weights)[c][k] : 1.0;
      out << iset.users[u] << '\t' << iset.items[i] << '\t' << c << '\t' << w << '\n';
    }
}

InteractionSet load_interactions_tsv(const std::filesystem::path& path,
                                     const std::vector<std::string>& users,
                                     const std::vector<std::string>& items,
                                     std::uint32_t n_criteria_plus1) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  InteractionSet iset;
  iset.users = users;
  iset.items = items;
  for (std::uint32_t k = 0; k < users.size(); ++k) iset.user_index.emplace(users[k], k);
  for (std::uint32_t k = 0; k < items.size(); ++k) iset.item_index.emplace(items[k], k);
  iset.n_criteria_plus1 = n_criteria_plus1;
  iset.positives.assign(n_criteria_plus1, {});
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string uid, iid;
    std::uint32_t c;
    double w;
    if (!(ls >> uid >> iid >> c >> w))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad line");
    auto uit = iset.user_index.find(uid);
    auto iit = iset.item_index.find(iid);
    if (uit == iset.user_index.end() || iit == iset.item_index.end())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": id not in vocabulary");
    if (c >= n_criteria_plus1)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": criterion out of range");
    iset.positives[c].emplace_back(uit->second, iit->second);
  }
  for (auto& ps : iset.positives) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  }
  return iset;
}

void save_vocab(const InteractionSet& iset, const std::filesystem::path& path) {
  json j;
  j["users"] = iset.users;
  j["items"] = iset.items;
  j["n_criteria_plus1"] = iset.n_criteria_plus1;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << "\n";
}

void load_vocab(const std::filesystem::path& path, std::vector<std::string>& users,
                std::vector<std::string>& items, std::uint32_t& n_criteria_plus1) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j = json::parse(in);
  users = j.at("users").get<std::vector<std::string>>();
  items = j.at("items").get<std::vector<std::string>>();
  n_criteria_plus1 = j.at("n_criteria_plus1").get<std::uint32_t>();
}

void save_rating_log_tsv(const RatingLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : log.records)
    out << r.user_id << '\t' << r.item_id << '\t' << r.criterion << '\t' << r.value << '\n';
}

}  // namespace mcrec
