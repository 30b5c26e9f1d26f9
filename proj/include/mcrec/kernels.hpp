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

#include <cstdint>
#include <vector>

#include "mcrec/graph.hpp"
#include "mcrec/matrix.hpp"

// Hot loops of the propagation model. Each kernel has an OpenMP variant
// (the production path) and a plain serial reference used by the tests and
// the kernel benchmark. Parallel variants split work by output row or by
// fixed-size row blocks, so results are bitwise identical to the serial
// reference at any thread count.

namespace mcrec::kernels {

void set_num_threads(std::uint32_t n);  // 0 = library default
std::uint32_t num_threads();

// y = A_hat * x (sparse CSR times dense, row-parallel).
void propagate(const NormalizedAdjacency& adj, const Matrix& x, Matrix& y);
void propagate_serial(const NormalizedAdjacency& adj, const Matrix& x, Matrix& y);

// Column means of x.
std::vector<double> col_means(const Matrix& x);
std::vector<double> col_means_serial(const Matrix& x);

// Squared Frobenius norm of (x - 1 * mean^T).
double centered_sq_norm(const Matrix& x, const std::vector<double>& mean);
double centered_sq_norm_serial(const Matrix& x, const std::vector<double>& mean);

// One application of the centering + rescaling normalizer.
struct PairNormStats {
  bool identity = false;      // pass-through (disabled or degenerate input)
  double frob = 0.0;          // ||x - mean||_F of the input
  std::vector<double> mean;   // column means of the input
};

// y = s * sqrt(n) * (x - mean) / ||x - mean||_F.
// Degenerate input (all rows equal): throws when strict, otherwise copies x
// through and marks the stats as identity.
PairNormStats pairnorm(const Matrix& x, double s, Matrix& y, bool strict);
PairNormStats pairnorm_serial(const Matrix& x, double s, Matrix& y, bool strict);

// Reverse-mode of pairnorm. y is the forward output, g the incoming
// gradient; returns the gradient w.r.t. the input. Identity stats pass g
// through unchanged.
Matrix pairnorm_vjp(const Matrix& y, const Matrix& g, const PairNormStats& st, double s);
Matrix pairnorm_vjp_serial(const Matrix& y, const Matrix& g, const PairNormStats& st,
                           double s);

// acc += w * x
void axpy(Matrix& acc, const Matrix& x, double w);

// Sum of x[r] dot y[r] over all rows (deterministic block reduction).
double dot_all(const Matrix& x, const Matrix& y);

// out[i] = z_user dot z_item_block_row(i) for i in [0, n_items)
void scores_against_block(const Matrix& z, std::uint64_t user_row,
                          std::uint64_t block_start, std::uint32_t n_items,
                          std::vector<double>& out);

}  // namespace mcrec::kernels
