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

// Compares the OpenMP kernels against their serial reference on synthetic
// graphs of growing size. Usage: mcrec-kernel-bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "mcrec/evaluation.hpp"
#include "mcrec/graph.hpp"
#include "mcrec/kernels.hpp"
#include "mcrec/matrix.hpp"
#include "mcrec/rng.hpp"

using namespace mcrec;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  double best = 1e100;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  const std::uint32_t d = 64;

  std::printf("threads=%u repeats=%d\n", kernels::num_threads(), repeats);
  std::printf("%-12s %12s %12s %12s %10s\n", "kernel", "edges", "serial_ms", "omp_ms",
              "speedup");

  for (std::uint64_t target : {50'000ULL, 200'000ULL, 1'000'000ULL}) {
    SyntheticOptions so;
    so.n_users = static_cast<std::uint32_t>(target / 80);
    so.n_items = so.n_users / 4;
    so.n_criteria = 3;
    so.density = std::min(1.0, 50.0 / so.n_items);
    so.seed = 7;
    RatingLog log = generate_synthetic(so);
    InteractionSet iset = binarize(log, synthetic_specs(so.n_criteria));
    McExpansionGraph g = build_graph(iset, {});
    NormalizedAdjacency adj = normalize(g);

    Matrix x(g.layout.node_count(), d), y_s, y_p;
    Rng rng(11);
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);

    const double t_ser =
        time_ms([&] { kernels::propagate_serial(adj, x, y_s); }, repeats);
    const double t_par = time_ms([&] { kernels::propagate(adj, x, y_p); }, repeats);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < y_s.data().size(); ++i)
      max_diff = std::max(max_diff, std::abs(y_s.data()[i] - y_p.data()[i]));
    std::printf("%-12s %12zu %12.3f %12.3f %9.2fx   (max_diff %.2e)\n", "propagate",
                g.n_edges(), t_ser, t_par, t_ser / t_par, max_diff);

    Matrix n_s, n_p;
    const double pn_ser =
        time_ms([&] { kernels::pairnorm_serial(x, 1.0, n_s, false); }, repeats);
    const double pn_par = time_ms([&] { kernels::pairnorm(x, 1.0, n_p, false); }, repeats);
    max_diff = 0.0;
    for (std::size_t i = 0; i < n_s.data().size(); ++i)
      max_diff = std::max(max_diff, std::abs(n_s.data()[i] - n_p.data()[i]));
    std::printf("%-12s %12zu %12.3f %12.3f %9.2fx   (max_diff %.2e)\n", "pairnorm",
                g.n_edges(), pn_ser, pn_par, pn_ser / pn_par, max_diff);
  }
  return 0;
}
