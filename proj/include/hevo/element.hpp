// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hevo {

/// Index into the countable orthonormal basis {e_i}; 0-based everywhere.
using BasisIndex = std::uint64_t;

struct Entry {
  BasisIndex index = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// A value together with a certified bound on how far the true (untruncated)
/// quantity can be from it.
struct Estimate {
  double value = 0.0;
  double uncertainty = 0.0;
};

/// Governs every infinite-series evaluation: indices >= cutoff are dropped,
/// abs_tol is the comparison tolerance, and results whose certified tail
/// exceeds max_tail are refused with ErrorCode::TailTooLarge.
struct TruncationPolicy {
  std::size_t cutoff = 256;
  double abs_tol = 1e-9;
  double max_tail = 1e-6;

  /// Throws InvalidParameter unless cutoff >= 1, abs_tol > 0, max_tail > 0.
  void validate() const;
};

/// A square-summable sequence sum_i v_i e_i held as a finite sorted support
/// plus a certified bound on the l2 norm of everything not stored.
///
/// Stored coefficients are finite and indices are unique. Tiny coefficients
/// are kept as written; only truncate() drops entries. Equality compares
/// coefficients (an absent index equals an explicit 0) and tail bounds.
class Element {
 public:
  Element() = default;

  /// Throws InvalidParameter on duplicate indices, non-finite values, or a
  /// negative / non-finite tail bound.
  static Element from_entries(std::vector<Entry> entries, double tail_bound = 0.0);
  static Element basis(BasisIndex i, double scale = 1.0);

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t support_size() const noexcept { return entries_.size(); }
  double tail_bound() const noexcept { return tail_bound_; }
  bool exact() const noexcept { return tail_bound_ == 0.0; }

  double coefficient(BasisIndex i) const noexcept;
  /// Sum of squares of the stored coefficients.
  double squared_norm() const noexcept;
  /// Sum of the stored coefficients.
  double sum() const noexcept;

  Element with_tail_bound(double tail_bound) const;

  friend bool operator==(const Element& a, const Element& b) noexcept;

 private:
  std::vector<Entry> entries_;
  double tail_bound_ = 0.0;
};

/// <v, w> over the common support; uncertainty from Cauchy-Schwarz on the
/// omitted mass.
Estimate inner_product(const Element& v, const Element& w);

/// The true norm lies in [value, value + uncertainty].
Estimate norm(const Element& v);

/// a*v + w with tail |a|*tau_v + tau_w.
Element axpy(double a, const Element& v, const Element& w);

/// Drops indices >= policy.cutoff and adds the l2 norm of the dropped part
/// to the tail bound. Throws TailTooLarge if the result exceeds max_tail.
Element truncate(const Element& v, const TruncationPolicy& policy);

}  // namespace hevo
