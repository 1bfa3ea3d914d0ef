// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#include "hevo/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hevo/compensated_sum.hpp"
#include "hevo/error.hpp"

namespace hevo {
namespace {

struct ExplicitColumns {
  std::map<BasisIndex, std::vector<Entry>> columns;
};

void check_column_entries(BasisIndex i, std::vector<Entry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (!std::isfinite(entries[j].value)) {
      throw Error(ErrorCode::InvalidParameter,
                  "non-finite structure constant in column " + std::to_string(i));
    }
    if (j > 0 && entries[j].index == entries[j - 1].index) {
      throw Error(ErrorCode::InvalidParameter,
                  "duplicate row index " + std::to_string(entries[j].index) + " in column " +
                      std::to_string(i));
    }
  }
}

// l2 bound for a tail of known l1 mass t. The l1 norm always dominates; with
// entries bounded by one, sum c^2 <= sum |c| gives sqrt(t) as well.
double l2_from_l1(double t, bool unit_bounded) {
  return unit_bounded ? std::min(t, std::sqrt(t)) : t;
}

// sqrt(sum_i v_i^2 ||col_i||^2) using certified column tails, or nullopt.
std::optional<double> certified_m(std::span<const Entry> v, std::span<const Column> columns) {
  CompensatedSum total;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j].value == 0.0) continue;
    if (!columns[j].tail_l2) return std::nullopt;
    CompensatedSum col;
    for (const auto& e : columns[j].entries) col.add(e.value * e.value);
    col.add(*columns[j].tail_l2 * *columns[j].tail_l2);
    total.add(v[j].value * v[j].value * col.value());
  }
  return std::sqrt(total.value());
}

std::vector<Column> fetch_columns(const StructureMap& s, const Element& v, std::size_t cutoff) {
  std::vector<Column> out;
  out.reserve(v.support_size());
  for (const auto& e : v.entries()) out.push_back(s.column(e.index, cutoff));
  return out;
}

// Shared by product() and LeftMultiplication::apply(), so both produce
// bit-identical coefficients.
Element multiply(const StructureMap& s, const Element& v, std::span<const Column> v_columns,
                 const Element& w, const TruncationPolicy& policy) {
  policy.validate();
  if (v.tail_bound() > policy.max_tail || w.tail_bound() > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge, "product input tail exceeds max_tail");
  }

  std::vector<double> weights;
  std::vector<const Column*> cols;
  const auto ve = v.entries();
  const auto we = w.entries();
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < ve.size() && b < we.size()) {
    if (ve[a].index < we[b].index) {
      ++a;
    } else if (we[b].index < ve[a].index) {
      ++b;
    } else {
      weights.push_back(ve[a].value * we[b].value);
      cols.push_back(&v_columns[a]);
      ++a;
      ++b;
    }
  }

  auto acc = detail::accumulate_columns(weights, cols);
  if (!acc.column_tail) {
    throw Error(ErrorCode::TailTooLarge, "product touches a column with an unbounded tail");
  }
  double tail = *acc.column_tail;

  const double tv = v.tail_bound();
  const double tw = w.tail_bound();
  if (tw > 0.0) {
    auto m = certified_m(ve, v_columns);
    if (!m) throw Error(ErrorCode::TailTooLarge, "cannot bound M_v for the tail of w");
    tail += *m * tw;
  }
  if (tv > 0.0) {
    auto w_columns = fetch_columns(s, w, policy.cutoff);
    auto m = certified_m(we, w_columns);
    if (!m) throw Error(ErrorCode::TailTooLarge, "cannot bound M_w for the tail of v");
    tail += *m * tv;
  }
  if (tv > 0.0 && tw > 0.0) {
    const auto& k = s.metadata().column_l2_sup;
    if (!k) throw Error(ErrorCode::TailTooLarge, "no bound on sup_i ||e_i^2|| for tail x tail");
    tail += std::sqrt(*k) * tv * tw;
  }
  if (!std::isfinite(tail)) {
    throw Error(ErrorCode::NonFiniteCoefficient, "product tail overflowed");
  }
  if (tail > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge,
                "product tail " + std::to_string(tail) + " exceeds max_tail");
  }
  return Element::from_entries(std::move(acc.entries), tail);
}

}  // namespace

namespace detail {

Accumulated accumulate_columns(std::span<const double> weights,
                               std::span<const Column* const> columns) {
  std::map<BasisIndex, CompensatedSum> sums;
  CompensatedSum tail;
  bool tail_known = true;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double wt = weights[j];
    if (wt == 0.0) continue;
    const Column& col = *columns[j];
    for (const auto& e : col.entries) sums[e.index].add(wt * e.value);
    if (col.tail_l2) {
      tail.add(std::abs(wt) * *col.tail_l2);
    } else {
      tail_known = false;
    }
  }
  Accumulated out;
  out.entries.reserve(sums.size());
  for (const auto& [k, sum] : sums) {
    const double x = sum.value();
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::NonFiniteCoefficient,
                  "coefficient at index " + std::to_string(k) + " overflowed");
    }
    out.entries.push_back({k, x});
  }
  if (tail_known) out.column_tail = tail.value();
  return out;
}

}  // namespace detail

StructureMap::StructureMap(StructureKind kind, ColumnOracle oracle, StructureMetadata metadata)
    : kind_(kind), oracle_(std::move(oracle)), metadata_(std::move(metadata)) {}

StructureMap StructureMap::explicit_sparse(std::map<BasisIndex, std::vector<Entry>> columns) {
  StructureMetadata md;
  std::size_t extent = 0;
  double l1_sup = 0.0;
  double l2_sup = 0.0;
  bool unit = true;
  std::map<BasisIndex, CompensatedSum> row_sums;
  for (auto& [i, entries] : columns) {
    check_column_entries(i, entries);
    CompensatedSum l1;
    CompensatedSum l2;
    for (const auto& e : entries) {
      if (e.value == 0.0) continue;
      extent = std::max<std::size_t>(extent, std::max(i, e.index) + 1);
      l1.add(std::abs(e.value));
      l2.add(e.value * e.value);
      row_sums[e.index].add(std::abs(e.value));
      if (std::abs(e.value) > 1.0) unit = false;
    }
    l1_sup = std::max(l1_sup, l1.value());
    l2_sup = std::max(l2_sup, l2.value());
  }
  double row_sup = 0.0;
  for (const auto& [k, sum] : row_sums) row_sup = std::max(row_sup, sum.value());

  auto shared = std::make_shared<const ExplicitColumns>(ExplicitColumns{std::move(columns)});
  md.extent = extent;
  md.column_l1_sup = l1_sup;
  md.row_l1_sup = row_sup;
  md.column_l2_sup = l2_sup;
  md.unit_bounded = unit;
  md.column_l1 = [shared](BasisIndex i) {
    auto it = shared->columns.find(i);
    if (it == shared->columns.end()) return 0.0;
    CompensatedSum l1;
    for (const auto& e : it->second) l1.add(std::abs(e.value));
    return l1.value();
  };

  ColumnOracle oracle = [shared](BasisIndex i, std::size_t cutoff) {
    RawColumn raw;
    raw.tail_l1 = 0.0;
    auto it = shared->columns.find(i);
    if (it == shared->columns.end()) return raw;
    CompensatedSum l1;
    for (const auto& e : it->second) {
      if (e.index < cutoff) {
        raw.entries.push_back(e);
      } else {
        l1.add(std::abs(e.value));
      }
    }
    raw.tail_l1 = l1.value();
    return raw;
  };

  // Explicit columns know their dropped entries exactly, so l2 tails are
  // recomputed from them in column() rather than derived from l1.
  StructureMap s(StructureKind::ExplicitSparse, std::move(oracle), std::move(md));
  auto l2_oracle = [shared](BasisIndex i, std::size_t cutoff) {
    CompensatedSum l2;
    auto it = shared->columns.find(i);
    if (it != shared->columns.end()) {
      for (const auto& e : it->second) {
        if (e.index >= cutoff) l2.add(e.value * e.value);
      }
    }
    return std::sqrt(l2.value());
  };
  s.explicit_l2_ = std::move(l2_oracle);
  return s;
}

StructureMap StructureMap::lazy(ColumnOracle oracle, StructureMetadata metadata) {
  return StructureMap(StructureKind::LazyFormula, std::move(oracle), std::move(metadata));
}

Column StructureMap::column(BasisIndex i, std::size_t cutoff) const {
  RawColumn raw = oracle_(i, cutoff);
  check_column_entries(i, raw.entries);

  Column col;
  std::optional<double> extra_l1 = 0.0;
  for (auto& e : raw.entries) {
    if (e.index < cutoff) {
      col.entries.push_back(e);
    } else {
      *extra_l1 += std::abs(e.value);
    }
  }
  if (raw.tail_l1) {
    const double t = std::max(0.0, *raw.tail_l1) + *extra_l1;
    col.tail_l1 = t;
    col.tail_l2 = explicit_l2_ ? explicit_l2_(i, cutoff) : l2_from_l1(t, metadata_.unit_bounded);
  }
  return col;
}

StructureMap StructureMap::with_norm_bound(double bound) const {
  StructureMap s = *this;
  s.metadata_.norm_bound = bound;
  return s;
}

Element square_basis(const StructureMap& s, BasisIndex i, const TruncationPolicy& policy) {
  policy.validate();
  Column col = s.column(i, policy.cutoff);
  if (!col.tail_l2) {
    throw Error(ErrorCode::TailTooLarge,
                "column " + std::to_string(i) + " has no certified tail past the cutoff");
  }
  if (*col.tail_l2 > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge, "column " + std::to_string(i) + " tail " +
                                             std::to_string(*col.tail_l2) + " exceeds max_tail");
  }
  // Same arithmetic path as product(e_i, e_i): weight 1 * 1.
  const double one = 1.0;
  const Column* ptr = &col;
  auto acc = detail::accumulate_columns(std::span(&one, 1), std::span(&ptr, 1));
  return Element::from_entries(std::move(acc.entries), *acc.column_tail);
}

Element product(const StructureMap& s, const Element& v, const Element& w,
                const TruncationPolicy& policy) {
  policy.validate();
  auto columns = fetch_columns(s, v, policy.cutoff);
  return multiply(s, v, columns, w, policy);
}

LeftMultiplication::LeftMultiplication(StructureMap s, Element v, const TruncationPolicy& policy)
    : s_(std::move(s)), v_(std::move(v)), cached_cutoff_(policy.cutoff) {
  columns_ = fetch_columns(s_, v_, cached_cutoff_);
}

Element LeftMultiplication::apply(const Element& w, const TruncationPolicy& policy) const {
  if (policy.cutoff == cached_cutoff_) return multiply(s_, v_, columns_, w, policy);
  auto columns = fetch_columns(s_, v_, policy.cutoff);
  return multiply(s_, v_, columns, w, policy);
}

ContinuityBound continuity_bound(const StructureMap& s, const Element& v,
                                 const TruncationPolicy& policy) {
  policy.validate();
  if (!v.exact()) {
    throw Error(ErrorCode::UnsupportedInput, "continuity_bound needs a finitely supported v");
  }
  ContinuityBound out;
  CompensatedSum total;
  for (const auto& e : v.entries()) {
    Column col = s.column(e.index, policy.cutoff);
    CompensatedSum c2;
    for (const auto& c : col.entries) c2.add(c.value * c.value);
    if (col.tail_l2) {
      c2.add(*col.tail_l2 * *col.tail_l2);
    }
    if (!col.complete()) out.exact = false;
    total.add(e.value * e.value * c2.value());
  }
  out.m_v = std::sqrt(total.value());
  return out;
}

}  // namespace hevo
