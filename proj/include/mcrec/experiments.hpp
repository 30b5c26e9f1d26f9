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

#include "mcrec/evaluation.hpp"
#include "mcrec/training.hpp"

namespace mcrec {

enum class SweepParameter { Layers, Dim, Alpha, NCriteria };

SweepParameter sweep_parameter_from_string(const std::string& s);

struct SweepRow {
  double value = 0.0;
  double test_ndcg10 = 0.0;
  double val_ndcg10 = 0.0;
};

// Train one model per parameter value under a shared seed and report the
// validation-selected test NDCG@10. The n_criteria sweep keeps the first k
// criteria (overall included).
std::vector<SweepRow> sweep(const TrainConfig& base, SweepParameter param,
                            const std::vector<double>& values, const SplitResult& splits);

struct BenchRow {
  std::uint64_t target_edges = 0;
  std::uint64_t realized_edges = 0;
  std::uint64_t nodes = 0;
  double seconds_per_epoch = 0.0;  // median over repeats
};

struct BenchOptions {
  std::vector<std::uint64_t> sizes;  // target edge counts, increasing
  std::uint32_t epochs_per_size = 3;
  TrainConfig config;
};

// Generates one synthetic training graph per target size and measures the
// wall-clock time of a training epoch (median over epochs_per_size).
std::vector<BenchRow> bench_linear_scaling(const BenchOptions& opts);

// Least-squares fit quality of seconds ~ a + b * edges over the rows.
double bench_r_squared(const std::vector<BenchRow>& rows);

void save_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);
void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& parameter,
                    const std::filesystem::path& path);

}  // namespace mcrec
