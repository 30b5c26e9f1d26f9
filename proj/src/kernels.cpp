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

#include "mcrec/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace mcrec::kernels {

namespace {
// Reduction block size. Partials are combined in block order, which keeps
// sums independent of the thread count.
constexpr std::size_t kBlockRows = 256;
}  // namespace

void set_num_threads(std::uint32_t n) {
  if (n > 0) omp_set_num_threads(static_cast<int>(n));
}

std::uint32_t num_threads() { return static_cast<std::uint32_t>(omp_get_max_threads()); }

// --- propagate ---------------------------------------------------------------

void propagate_serial(const NormalizedAdjacency& adj, const Matrix& x, Matrix& y) {
  if (x.rows() != adj.n_nodes) throw std::invalid_argument("propagate: row count != |V|");
  if (!y.same_shape(x)) y = Matrix(x.rows(), x.cols());
  const std::size_t d = x.cols();
  for (std::uint64_t v = 0; v < adj.n_nodes; ++v) {
    double* out = y.row(v);
    for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
    for (std::uint64_t e = adj.row_ptr[v]; e < adj.row_ptr[v + 1]; ++e) {
      const double c = adj.coef[e];
      const double* in = x.row(adj.col[e]);
      for (std::size_t j = 0; j < d; ++j) out[j] += c * in[j];
    }
  }
}

void propagate(const NormalizedAdjacency& adj, const Matrix& x, Matrix& y) {
  if (x.rows() != adj.n_nodes) throw std::invalid_argument("propagate: row count != |V|");
  if (!y.same_shape(x)) y = Matrix(x.rows(), x.cols());
  const std::size_t d = x.cols();
  const std::int64_t n = static_cast<std::int64_t>(adj.n_nodes);
#pragma omp parallel for schedule(dynamic, 512)
  for (std::int64_t v = 0; v < n; ++v) {
    double* out = y.row(static_cast<std::uint64_t>(v));
    for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
    for (std::uint64_t e = adj.row_ptr[v]; e < adj.row_ptr[v + 1]; ++e) {
      const double c = adj.coef[e];
      const double* in = x.row(adj.col[e]);
      for (std::size_t j = 0; j < d; ++j) out[j] += c * in[j];
    }
  }
}

// --- reductions ----------------------------------------------------------------

std::vector<double> col_means_serial(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* r = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += r[j];
  }
  const double inv = x.rows() > 0 ? 1.0 / static_cast<double>(x.rows()) : 0.0;
  for (auto& m : mean) m *= inv;
  return mean;
}

std::vector<double> col_means(const Matrix& x) {
  const std::size_t n_blocks = (x.rows() + kBlockRows - 1) / kBlockRows;
  if (n_blocks <= 1) return col_means_serial(x);
  std::vector<double> partial(n_blocks * x.cols(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    double* acc = partial.data() + static_cast<std::size_t>(b) * x.cols();
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockRows;
    const std::size_t hi = std::min(lo + kBlockRows, x.rows());
    for (std::size_t i = lo; i < hi; ++i) {
      const double* r = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) acc[j] += r[j];
    }
  }
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += partial[b * x.cols() + j];
  const double inv = 1.0 / static_cast<double>(x.rows());
  for (auto& m : mean) m *= inv;
  return mean;
}

double centered_sq_norm_serial(const Matrix& x, const std::vector<double>& mean) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* r = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double m = r[j] - mean[j];
      acc += m * m;
    }
  }
  return acc;
}

double centered_sq_norm(const Matrix& x, const std::vector<double>& mean) {
  const std::size_t n_blocks = (x.rows() + kBlockRows - 1) / kBlockRows;
  if (n_blocks <= 1) return centered_sq_norm_serial(x, mean);
  std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockRows;
    const std::size_t hi = std::min(lo + kBlockRows, x.rows());
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double* r = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double m = r[j] - mean[j];
        acc += m * m;
      }
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// --- pairnorm -------------------------------------------------------------------

namespace {

PairNormStats pairnorm_impl(const Matrix& x, double s, Matrix& y, bool strict,
                            bool parallel) {
  if (x.rows() == 0) throw std::invalid_argument("pairnorm: empty input");
  if (s <= 0.0) throw std::invalid_argument("pairnorm: scale must be positive");
  PairNormStats st;
  st.mean = parallel ? col_means(x) : col_means_serial(x);
  const double sq = parallel ? centered_sq_norm(x, st.mean)
                             : centered_sq_norm_serial(x, st.mean);
  st.frob = std::sqrt(sq);
  if (!y.same_shape(x)) y = Matrix(x.rows(), x.cols());
  if (st.frob == 0.0) {
    if (strict) throw std::runtime_error("pairnorm: degenerate input (all rows equal)");
    st.identity = true;
    y.data() = x.data();
    return st;
  }
  const double scale = s * std::sqrt(static_cast<double>(x.rows())) / st.frob;
  const std::int64_t n = static_cast<std::int64_t>(x.rows());
  const std::size_t d = x.cols();
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const double* in = x.row(static_cast<std::size_t>(i));
      double* out = y.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < d; ++j) out[j] = scale * (in[j] - st.mean[j]);
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      const double* in = x.row(static_cast<std::size_t>(i));
      double* out = y.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < d; ++j) out[j] = scale * (in[j] - st.mean[j]);
    }
  }
  return st;
}

// dX = c*G - (<G,Y>/(s*sqrt(n)*F)) * Y, then column-centered; c = s*sqrt(n)/F.
// Y is the forward output, so the centered input is Y * F / (s*sqrt(n)).
Matrix pairnorm_vjp_impl(const Matrix& y, const Matrix& g, const PairNormStats& st,
                         double s, bool parallel) {
  require_same_shape(y, g, "pairnorm_vjp");
  if (st.identity) return g;
  const double n = static_cast<double>(y.rows());
  const double srn = s * std::sqrt(n);
  const double c = srn / st.frob;
  const double gy = parallel ? dot_all(g, y) : [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) {
      const double* a = g.row(i);
      const double* b = y.row(i);
      for (std::size_t j = 0; j < g.cols(); ++j) acc += a[j] * b[j];
    }
    return acc;
  }();
  const double k = gy / (srn * st.frob);

  Matrix dm(y.rows(), y.cols());
  const std::int64_t rows = static_cast<std::int64_t>(y.rows());
  const std::size_t d = y.cols();
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
      const double* gr = g.row(static_cast<std::size_t>(i));
      const double* yr = y.row(static_cast<std::size_t>(i));
      double* out = dm.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < d; ++j) out[j] = c * gr[j] - k * yr[j];
    }
  } else {
    for (std::int64_t i = 0; i < rows; ++i) {
      const double* gr = g.row(static_cast<std::size_t>(i));
      const double* yr = y.row(static_cast<std::size_t>(i));
      double* out = dm.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < d; ++j) out[j] = c * gr[j] - k * yr[j];
    }
  }

  // Centering has Jacobian I - (1/n) * ones, applied per column.
  std::vector<double> colmean = parallel ? col_means(dm) : col_means_serial(dm);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
      double* out = dm.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < d; ++j) out[j] -= colmean[j];
    }
  } else {
    for (std::int64_t i = 0; i < rows; ++i) {
      double* out = dm.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < d; ++j) out[j] -= colmean[j];
    }
  }
  return dm;
}

}  // namespace

PairNormStats pairnorm(const Matrix& x, double s, Matrix& y, bool strict) {
  return pairnorm_impl(x, s, y, strict, true);
}

PairNormStats pairnorm_serial(const Matrix& x, double s, Matrix& y, bool strict) {
  return pairnorm_impl(x, s, y, strict, false);
}

Matrix pairnorm_vjp(const Matrix& y, const Matrix& g, const PairNormStats& st, double s) {
  return pairnorm_vjp_impl(y, g, st, s, true);
}

Matrix pairnorm_vjp_serial(const Matrix& y, const Matrix& g, const PairNormStats& st,
                           double s) {
  return pairnorm_vjp_impl(y, g, st, s, false);
}

// --- small helpers ----------------------------------------------------------------

void axpy(Matrix& acc, const Matrix& x, double w) {
  require_same_shape(acc, x, "axpy");
  const std::int64_t n = static_cast<std::int64_t>(acc.data().size());
  double* a = acc.data().data();
  const double* b = x.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) a[i] += w * b[i];
}

double dot_all(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "dot_all");
  const std::size_t n_blocks = (x.rows() + kBlockRows - 1) / kBlockRows;
  std::vector<double> partial(n_blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlockRows;
    const std::size_t hi = std::min(lo + kBlockRows, x.rows());
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double* a = x.row(i);
      const double* c = y.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) acc += a[j] * c[j];
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void scores_against_block(const Matrix& z, std::uint64_t user_row, std::uint64_t block_start,
                          std::uint32_t n_items, std::vector<double>& out) {
  out.resize(n_items);
  const double* u = z.row(user_row);
  const std::size_t d = z.cols();
  for (std::uint32_t i = 0; i < n_items; ++i) {
    const double* v = z.row(block_start + i);
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += u[j] * v[j];
    out[i] = acc;
  }
}

}  // namespace mcrec::kernels
