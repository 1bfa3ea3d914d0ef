// Conversions between dense oracles and library objects.

#pragma once

#include <map>
#include <random>
#include <vector>

#include "dense_oracle.hpp"
#include "hevo/algebra.hpp"
#include "hevo/markov.hpp"

namespace hevo::testing {

inline StructureMap to_map(const Mat& c) {
  std::map<BasisIndex, std::vector<Entry>> cols;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto& col = cols[i];
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k][i] != 0.0) col.push_back({k, c[k][i]});
    }
  }
  return StructureMap::explicit_sparse(std::move(cols));
}

inline TransitionKernel to_kernel(const Mat& p) {
  std::map<BasisIndex, std::vector<Entry>> rows;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& row = rows[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[i][k] != 0.0) row.push_back({k, p[i][k]});
    }
  }
  return build_from_triples(rows);
}

inline Mat transpose(const Mat& m) {
  Mat t(m.front().size(), Vec(m.size(), 0.0));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

inline Element to_element(const Vec& v) {
  std::vector<Entry> e;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) e.push_back({i, v[i]});
  }
  return Element::from_entries(std::move(e));
}

inline Vec random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline double max_diff(const Element& got, const Vec& want) {
  double worst = 0.0;
  for (std::size_t k = 0; k < want.size(); ++k) {
    worst = std::max(worst, std::abs(got.coefficient(k) - want[k]));
  }
  for (const auto& e : got.entries()) {
    if (e.index >= want.size()) worst = std::max(worst, std::abs(e.value));
  }
  return worst;
}

}  // namespace hevo::testing
