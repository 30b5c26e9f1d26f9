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

#include "mcrec/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace mcrec {

using nlohmann::json;

namespace {

constexpr char kMagic[] = "MCRECCKPT1\n";

void write_table(std::ofstream& out, const Matrix& m) {
  out.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(double)));
}

Matrix read_table(std::ifstream& in, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data().data()),
          static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint: truncated table data");
  return m;
}

json table_shape(const Matrix& m) { return json::array({m.rows(), m.cols()}); }

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  json hdr;
  hdr["kind"] = ck.kind;
  hdr["layout"] = {{"n_users", ck.layout.n_users},
                   {"n_items", ck.layout.n_items},
                   {"n_criteria_plus1", ck.layout.n_criteria_plus1}};
  hdr["dim"] = ck.dim;
  hdr["config"] = ck.config_echo;
  hdr["users"] = ck.users;
  hdr["items"] = ck.items;

  json tables = json::array();
  if (ck.kind == "lightgcn_mc") {
    for (const auto& t : ck.segment_tables)
      tables.push_back({{"name", "segment_e0"}, {"shape", table_shape(t)}});
  } else {
    tables.push_back({{"name", "e0"}, {"shape", table_shape(ck.state.e0)}});
    if (ck.state.has_p) {
      tables.push_back({{"name", "p0_user"}, {"shape", table_shape(ck.state.p0_user)}});
      tables.push_back({{"name", "p0_proto"}, {"shape", table_shape(ck.state.p0_proto)}});
    }
  }
  hdr["tables"] = tables;

  std::string hdr_str = hdr.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof(kMagic) - 1);
  std::uint64_t len = hdr_str.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(hdr_str.data(), static_cast<std::streamsize>(hdr_str.size()));

  if (ck.kind == "lightgcn_mc") {
    for (const auto& t : ck.segment_tables) write_table(out, t);
  } else {
    write_table(out, ck.state.e0);
    if (ck.state.has_p) {
      write_table(out, ck.state.p0_user);
      write_table(out, ck.state.p0_proto);
    }
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  char magic[sizeof(kMagic) - 1];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a checkpoint file (bad magic): " + path.string());
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string hdr_str(len, '\0');
  in.read(hdr_str.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("checkpoint: truncated header");
  json hdr = json::parse(hdr_str);

  Checkpoint ck;
  ck.kind = hdr.at("kind").get<std::string>();
  ck.layout.n_users = hdr.at("layout").at("n_users").get<std::uint32_t>();
  ck.layout.n_items = hdr.at("layout").at("n_items").get<std::uint32_t>();
  ck.layout.n_criteria_plus1 = hdr.at("layout").at("n_criteria_plus1").get<std::uint32_t>();
  ck.dim = hdr.at("dim").get<std::uint32_t>();
  ck.config_echo = hdr.value("config", json::object());
  ck.users = hdr.at("users").get<std::vector<std::string>>();
  ck.items = hdr.at("items").get<std::vector<std::string>>();

  ck.state.dim = ck.dim;
  ck.state.has_p = false;
  for (const auto& t : hdr.at("tables")) {
    const std::string name = t.at("name").get<std::string>();
    const std::size_t rows = t.at("shape")[0].get<std::size_t>();
    const std::size_t cols = t.at("shape")[1].get<std::size_t>();
    if (name == "segment_e0") {
      ck.segment_tables.push_back(read_table(in, rows, cols));
    } else if (name == "e0") {
      ck.state.e0 = read_table(in, rows, cols);
    } else if (name == "p0_user") {
      ck.state.p0_user = read_table(in, rows, cols);
      ck.state.has_p = true;
    } else if (name == "p0_proto") {
      ck.state.p0_proto = read_table(in, rows, cols);
    } else {
      throw std::runtime_error("checkpoint: unknown table " + name);
    }
  }
  return ck;
}

}  // namespace mcrec
