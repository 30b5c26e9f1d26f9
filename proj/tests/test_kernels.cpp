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

#include <doctest.h>

#include "mcrec/kernels.hpp"
#include "mcrec/rng.hpp"
#include "oracles.hpp"

using namespace mcrec;

TEST_SUITE_BEGIN("kernels");

TEST_CASE("parallel propagate is bitwise equal to the serial reference") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    McExpansionGraph g = oracle::random_graph(rng, {8, 6, 3, 0.5});
    NormalizedAdjacency adj = normalize(g);
    Matrix x = oracle::random_matrix(rng, g.layout.node_count(), 7);
    Matrix ys, yp;
    kernels::propagate_serial(adj, x, ys);
    kernels::propagate(adj, x, yp);
    REQUIRE(ys.data() == yp.data());
  }
}

TEST_CASE("parallel pairnorm and vjp are bitwise equal to the serial reference") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(600);
    const std::size_t d = 1 + rng.uniform_int(9);
    Matrix x = oracle::random_matrix(rng, n, d);
    Matrix ys, yp;
    auto sts = kernels::pairnorm_serial(x, 1.0, ys, true);
    auto stp = kernels::pairnorm(x, 1.0, yp, true);
    REQUIRE(ys.data() == yp.data());
    REQUIRE(sts.frob == stp.frob);

    Matrix g = oracle::random_matrix(rng, n, d);
    Matrix ds = kernels::pairnorm_vjp_serial(ys, g, sts, 1.0);
    Matrix dp = kernels::pairnorm_vjp(yp, g, stp, 1.0);
    REQUIRE(ds.data() == dp.data());
  }
}

TEST_CASE("block reductions match the serial reference") {
  Rng rng(43);
  Matrix x = oracle::random_matrix(rng, 1111, 5);
  auto ms = kernels::col_means_serial(x);
  auto mp = kernels::col_means(x);
  REQUIRE(ms.size() == mp.size());
  for (std::size_t j = 0; j < ms.size(); ++j) CHECK(ms[j] == doctest::Approx(mp[j]).epsilon(1e-14));
  CHECK(kernels::centered_sq_norm_serial(x, ms) ==
        doctest::Approx(kernels::centered_sq_norm(x, mp)).epsilon(1e-13));
}

TEST_CASE("pairnorm worked examples") {
  // Already-normalized input passes through.
  Matrix x(2, 2);
  x.at(0, 0) = 1.0;
  x.at(1, 0) = -1.0;
  Matrix y;
  kernels::pairnorm(x, 1.0, y, true);
  CHECK(y.at(0, 0) == doctest::Approx(1.0));
  CHECK(y.at(0, 1) == doctest::Approx(0.0));
  CHECK(y.at(1, 0) == doctest::Approx(-1.0));

  // {(2,0),(0,0)} -> {(1,0),(-1,0)}
  Matrix x2(2, 2);
  x2.at(0, 0) = 2.0;
  Matrix y2;
  kernels::pairnorm(x2, 1.0, y2, true);
  CHECK(y2.at(0, 0) == doctest::Approx(1.0));
  CHECK(y2.at(1, 0) == doctest::Approx(-1.0));
  CHECK(y2.at(0, 1) == doctest::Approx(0.0));

  // Degenerate input errors in strict mode and passes through otherwise.
  Matrix x3(2, 2);
  x3.fill(3.0);
  Matrix y3;
  CHECK_THROWS(kernels::pairnorm(x3, 1.0, y3, true));
  auto st = kernels::pairnorm(x3, 1.0, y3, false);
  CHECK(st.identity);
  CHECK(y3.data() == x3.data());
}

TEST_CASE("pairnorm post-state invariants over random tables") {
  Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(40);
    const std::size_t d = 1 + rng.uniform_int(16);
    const double s = std::vector<double>{0.5, 1.0, 2.0}[rng.uniform_int(3)];
    Matrix x = oracle::random_matrix(rng, n, d, -3.0, 3.0);
    Matrix y;
    kernels::pairnorm(x, s, y, true);

    auto mean = kernels::col_means_serial(y);
    for (double m : mean) CHECK(std::abs(m) <= 1e-8);

    double sq = 0.0;
    for (double v : y.data()) sq += v * v;
    CHECK(sq / static_cast<double>(n) == doctest::Approx(s * s).epsilon(1e-8));

    // Mean pairwise squared distance (ordered pairs) is 2 s^2.
    CHECK(oracle::brute_mean_pairwise_sq(y) == doctest::Approx(2.0 * s * s).epsilon(1e-6));
  }
}

TEST_CASE("pairnorm vjp matches finite differences") {
  Rng rng(45);
  const std::size_t n = 5, d = 3;
  Matrix x = oracle::random_matrix(rng, n, d);
  Matrix w = oracle::random_matrix(rng, n, d);  // fixed cotangent

  auto loss = [&] {
    Matrix y;
    kernels::pairnorm(x, 1.3, y, true);
    double acc = 0.0;
    for (std::size_t k = 0; k < y.data().size(); ++k) acc += w.data()[k] * y.data()[k];
    return acc;
  };
  auto fd = oracle::finite_diff(x.data(), loss);

  Matrix y;
  auto st = kernels::pairnorm(x, 1.3, y, true);
  Matrix g = kernels::pairnorm_vjp(y, w, st, 1.3);
  for (std::size_t k = 0; k < g.data().size(); ++k)
    CHECK(g.data()[k] == doctest::Approx(fd[k]).epsilon(1e-6));
}

TEST_SUITE_END();
