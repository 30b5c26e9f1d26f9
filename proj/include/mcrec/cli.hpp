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

#include <string>
#include <vector>

namespace mcrec {

// Entry point of the command-line tool; argv-style arguments without the
// program name. Returns the process exit code (0 only when every output was
// written and validated).
int run_cli(const std::vector<std::string>& args);

}  // namespace mcrec
