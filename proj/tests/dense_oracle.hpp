// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense reference implementations used as test oracles. Nothing here calls
// into the library's arithmetic.

#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace hevo::testing {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // m[row][col]

// Evolution algebra on n generators with e_i * e_i = sum_k c[k][i] e_k and
// e_i * e_j = 0 otherwise.
struct DenseAlgebra {
  Mat c;

  std::size_t dim() const { return c.size(); }

  Vec square(std::size_t i) const {
    Vec out(dim(), 0.0);
    for (std::size_t k = 0; k < dim(); ++k) out[k] = c[k][i];
    return out;
  }

  // Bilinear expansion over all pairs (i, j), using e_i e_j = delta_ij e_i^2.
  Vec product(const Vec& v, const Vec& w) const {
    Vec out(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t j = 0; j < dim(); ++j) {
        if (i != j) continue;
        const Vec sq = square(i);
        for (std::size_t k = 0; k < dim(); ++k) out[k] += v[i] * w[j] * sq[k];
      }
    }
    return out;
  }

  // Linear extension of e_i -> e_i^2.
  Vec evolve(const Vec& v) const {
    Vec out(dim(), 0.0);
    for (std::size_t i = 0; i < dim(); ++i) {
      const Vec sq = square(i);
      for (std::size_t k = 0; k < dim(); ++k) out[k] += v[i] * sq[k];
    }
    return out;
  }
};

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.front().size();
  Mat out(n, Vec(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < b.size(); ++l) {
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
    }
  }
  return out;
}

inline Mat matpow(const Mat& p, std::size_t n) {
  Mat out(p.size(), Vec(p.size(), 0.0));
  for (std::size_t i = 0; i < p.size(); ++i) out[i][i] = 1.0;
  for (std::size_t s = 0; s < n; ++s) out = matmul(out, p);
  return out;
}

// Row-stochastic n x n matrix with random sparsity.
inline Mat random_stochastic(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat p(n, Vec(n, 0.0));
  for (auto& row : p) {
    double total = 0.0;
    for (auto& x : row) {
      x = u(rng) < 0.4 ? 0.0 : u(rng);
      total += x;
    }
    if (total == 0.0) {
      row[0] = 1.0;
      total = 1.0;
    }
    for (auto& x : row) x /= total;
  }
  return p;
}

// Sum over all state paths i = x_0 -> ... -> x_n = k of the product of
// transition probabilities, for a chain whose rows are given by `prob`
// restricted to states < n_states.
inline double path_sum(const std::function<double(std::size_t, std::size_t)>& prob,
                       std::size_t n_states, std::size_t from, std::size_t to, std::size_t n) {
  if (n == 0) return from == to ? 1.0 : 0.0;
  double total = 0.0;
  for (std::size_t mid = 0; mid < n_states; ++mid) {
    const double p = prob(from, mid);
    if (p != 0.0) total += p * path_sum(prob, n_states, mid, to, n - 1);
  }
  return total;
}

}  // namespace hevo::testing
