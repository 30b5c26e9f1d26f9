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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcrec/graph.hpp"
#include "mcrec/matrix.hpp"
#include "mcrec/model.hpp"

namespace mcrec {

// Model checkpoint: a versioned magic string, a JSON header (layout, id
// vocabulary, config echo, model kind), then raw little-endian doubles for
// each table listed in the header.
struct Checkpoint {
  std::string kind = "cpa-lgc";  // or "lightgcn", "lightgcn_mc"
  GraphLayout layout;
  std::uint32_t dim = 0;
  nlohmann::json config_echo;
  std::vector<std::string> users;
  std::vector<std::string> items;

  // cpa-lgc / lightgcn tables
  EmbeddingState state;
  // lightgcn_mc: one table per criterion graph
  std::vector<Matrix> segment_tables;
};

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mcrec
