// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hevo/element.hpp"

namespace hevo {

/// What a column oracle hands back for e_i * e_i: the structure constants
/// c_ki with k < cutoff (ascending, unique) and, when known, a certified l1
/// mass of the constants at k >= cutoff.
struct RawColumn {
  std::vector<Entry> entries;
  std::optional<double> tail_l1;
};

/// A column as seen by the algebra, with certified tails in l1 and l2.
/// Missing tails mean the oracle could not bound what lies past the cutoff.
struct Column {
  std::vector<Entry> entries;
  std::optional<double> tail_l1;
  std::optional<double> tail_l2;

  bool complete() const noexcept { return tail_l1 && *tail_l1 == 0.0; }
};

enum class StructureKind { ExplicitSparse, LazyFormula };

/// Certified facts about the whole, untruncated set of structure constants.
/// Each field is optional; absent means "unknown", never "zero".
struct StructureMetadata {
  /// All nonzero c_ki have i < extent and k < extent.
  std::optional<std::size_t> extent;
  /// Exact l1 mass of the full column i.
  std::function<double(BasisIndex)> column_l1;
  /// sup_i sum_k |c_ki|
  std::optional<double> column_l1_sup;
  /// sup_k sum_i |c_ki|
  std::optional<double> row_l1_sup;
  /// sup_i sum_k |c_ki|^2
  std::optional<double> column_l2_sup;
  /// Every |c_ki| <= 1.
  bool unit_bounded = false;
  /// Certified bound on the norm of the evolution operator.
  std::optional<double> norm_bound;
};

/// The column oracle i -> {c_ki} of a Hilbert evolution algebra in a fixed
/// orthonormal natural basis, i.e. e_i * e_i = sum_k c_ki e_k and
/// e_i * e_j = 0 for i != j.
///
/// Copies share the underlying oracle; oracles must tolerate concurrent
/// read-only calls.
class StructureMap {
 public:
  using ColumnOracle = std::function<RawColumn(BasisIndex i, std::size_t cutoff)>;

  /// Columns given in full. Extent, column masses and sups are computed
  /// exactly; tails past a cutoff come from the dropped entries.
  static StructureMap explicit_sparse(std::map<BasisIndex, std::vector<Entry>> columns);

  static StructureMap lazy(ColumnOracle oracle, StructureMetadata metadata);

  Column column(BasisIndex i, std::size_t cutoff) const;

  StructureKind kind() const noexcept { return kind_; }
  const StructureMetadata& metadata() const noexcept { return metadata_; }

  StructureMap with_norm_bound(double bound) const;

 private:
  StructureMap(StructureKind kind, ColumnOracle oracle, StructureMetadata metadata);

  StructureKind kind_;
  ColumnOracle oracle_;
  StructureMetadata metadata_;
  // Exact l2 norm of the dropped part of an explicit column.
  std::function<double(BasisIndex, std::size_t)> explicit_l2_;
};

/// e_i * e_i truncated to the policy's cutoff. Throws TailTooLarge when the
/// column tail is unknown or larger than max_tail.
Element square_basis(const StructureMap& s, BasisIndex i, const TruncationPolicy& policy);

/// v * w = sum_k (sum_i v_i w_i c_ki) e_k, accumulated in ascending i.
///
/// The result tail covers truncated columns and the input tails (via M_v and
/// sup_i ||e_i^2||); an unbounded contribution raises TailTooLarge, as does
/// an input tail above max_tail. NonFiniteCoefficient on overflow.
Element product(const StructureMap& s, const Element& v, const Element& w,
                const TruncationPolicy& policy);

/// L_v(w) = v * w. Columns for v's support are fetched once at construction
/// for the given policy's cutoff; apply() with another cutoff refetches.
class LeftMultiplication {
 public:
  LeftMultiplication(StructureMap s, Element v, const TruncationPolicy& policy);

  Element apply(const Element& w, const TruncationPolicy& policy) const;

  const Element& multiplier() const noexcept { return v_; }

 private:
  StructureMap s_;
  Element v_;
  std::size_t cached_cutoff_;
  std::vector<Column> columns_;  // parallel to v_.entries()
};

struct ContinuityBound {
  double m_v = 0.0;
  /// Every column touched by v was complete under the policy.
  bool exact = true;
};

/// M_v = (sum_k sum_i |v_i c_ki|^2)^{1/2}, so that ||v * w|| <= M_v ||w||.
/// Column tails are added when certified; unknown tails leave m_v at its
/// in-window value with exact = false. Requires an exact v
/// (UnsupportedInput otherwise).
ContinuityBound continuity_bound(const StructureMap& s, const Element& v,
                                 const TruncationPolicy& policy);

namespace detail {

// Shared accumulation kernel: sum_j weight_j * column_j, ascending j.
// Returns the coefficients and the l2 bound on dropped column parts
// (nullopt when a weighted column has an unknown tail).
struct Accumulated {
  std::vector<Entry> entries;
  std::optional<double> column_tail;
};
Accumulated accumulate_columns(std::span<const double> weights,
                               std::span<const Column* const> columns);

}  // namespace detail

}  // namespace hevo
