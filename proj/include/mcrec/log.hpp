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

#include <cstdlib>
#include <iostream>
#include <string>

namespace mcrec::log {

enum class Level { Quiet = 0, Info = 1, Debug = 2 };

// Verbosity comes from the MCREC_LOG env var: "quiet", "info" (default), "debug".
inline Level level() {
  static Level lv = [] {
    const char* env = std::getenv("MCREC_LOG");
    if (env == nullptr) return Level::Info;
    std::string v(env);
    if (v == "quiet" || v == "0") return Level::Quiet;
    if (v == "debug" || v == "2") return Level::Debug;
    return Level::Info;
  }();
  return lv;
}

inline void info(const std::string& msg) {
  if (level() >= Level::Info) std::cerr << "[mcrec] " << msg << "\n";
}

inline void warn(const std::string& msg) {
  if (level() >= Level::Info) std::cerr << "[mcrec] warning: " << msg << "\n";
}

inline void debug(const std::string& msg) {
  if (level() >= Level::Debug) std::cerr << "[mcrec] debug: " << msg << "\n";
}

}  // namespace mcrec::log
