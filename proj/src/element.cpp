// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#include "hevo/element.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hevo/compensated_sum.hpp"
#include "hevo/error.hpp"

namespace hevo {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ErrorCode::UnsupportedInput: return "UnsupportedInput";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::NotMarkov: return "NotMarkov";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::MissingCertificate: return "MissingCertificate";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

void TruncationPolicy::validate() const {
  if (cutoff < 1) throw Error(ErrorCode::InvalidParameter, "cutoff must be >= 1");
  if (!(abs_tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "abs_tol must be > 0");
  if (!(max_tail > 0.0)) throw Error(ErrorCode::InvalidParameter, "max_tail must be > 0");
}

Element Element::from_entries(std::vector<Entry> entries, double tail_bound) {
  if (!std::isfinite(tail_bound) || tail_bound < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "tail bound must be finite and nonnegative");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (!std::isfinite(entries[j].value)) {
      throw Error(ErrorCode::InvalidParameter,
                  "non-finite coefficient at index " + std::to_string(entries[j].index));
    }
    if (j > 0 && entries[j].index == entries[j - 1].index) {
      throw Error(ErrorCode::InvalidParameter,
                  "duplicate index " + std::to_string(entries[j].index));
    }
  }
  Element e;
  e.entries_ = std::move(entries);
  e.tail_bound_ = tail_bound;
  return e;
}

Element Element::basis(BasisIndex i, double scale) { return from_entries({{i, scale}}); }

double Element::coefficient(BasisIndex i) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                             [](const Entry& e, BasisIndex idx) { return e.index < idx; });
  return (it != entries_.end() && it->index == i) ? it->value : 0.0;
}

double Element::squared_norm() const noexcept {
  CompensatedSum s;
  for (const auto& e : entries_) s.add(e.value * e.value);
  return s.value();
}

double Element::sum() const noexcept {
  CompensatedSum s;
  for (const auto& e : entries_) s.add(e.value);
  return s.value();
}

Element Element::with_tail_bound(double tail_bound) const {
  if (!std::isfinite(tail_bound) || tail_bound < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "tail bound must be finite and nonnegative");
  }
  Element e = *this;
  e.tail_bound_ = tail_bound;
  return e;
}

bool operator==(const Element& a, const Element& b) noexcept {
  if (a.tail_bound_ != b.tail_bound_) return false;
  auto ia = a.entries_.begin();
  auto ib = b.entries_.begin();
  while (ia != a.entries_.end() || ib != b.entries_.end()) {
    if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->index < ib->index)) {
      if (ia->value != 0.0) return false;
      ++ia;
    } else if (ia == a.entries_.end() || ib->index < ia->index) {
      if (ib->value != 0.0) return false;
      ++ib;
    } else {
      if (ia->value != ib->value) return false;
      ++ia;
      ++ib;
    }
  }
  return true;
}

Estimate inner_product(const Element& v, const Element& w) {
  CompensatedSum s;
  auto iv = v.entries().begin();
  auto iw = w.entries().begin();
  while (iv != v.entries().end() && iw != w.entries().end()) {
    if (iv->index < iw->index) {
      ++iv;
    } else if (iw->index < iv->index) {
      ++iw;
    } else {
      s.add(iv->value * iw->value);
      ++iv;
      ++iw;
    }
  }
  const double tv = v.tail_bound();
  const double tw = w.tail_bound();
  double uncertainty = 0.0;
  if (tv > 0.0 || tw > 0.0) {
    uncertainty = tv * tw + tv * std::sqrt(w.squared_norm()) + tw * std::sqrt(v.squared_norm());
  }
  return {s.value(), uncertainty};
}

Estimate norm(const Element& v) {
  const double value = std::sqrt(v.squared_norm());
  const double t = v.tail_bound();
  if (t == 0.0) return {value, 0.0};
  return {value, std::hypot(value, t) - value};
}

Element axpy(double a, const Element& v, const Element& w) {
  std::vector<Entry> out;
  out.reserve(v.support_size() + w.support_size());
  auto iv = v.entries().begin();
  auto iw = w.entries().begin();
  while (iv != v.entries().end() || iw != w.entries().end()) {
    if (iw == w.entries().end() || (iv != v.entries().end() && iv->index < iw->index)) {
      out.push_back({iv->index, a * iv->value});
      ++iv;
    } else if (iv == v.entries().end() || iw->index < iv->index) {
      out.push_back(*iw);
      ++iw;
    } else {
      out.push_back({iv->index, a * iv->value + iw->value});
      ++iv;
      ++iw;
    }
  }
  for (const auto& e : out) {
    if (!std::isfinite(e.value)) {
      throw Error(ErrorCode::NonFiniteCoefficient,
                  "axpy overflow at index " + std::to_string(e.index));
    }
  }
  return Element::from_entries(std::move(out), std::abs(a) * v.tail_bound() + w.tail_bound());
}

Element truncate(const Element& v, const TruncationPolicy& policy) {
  std::vector<Entry> kept;
  CompensatedSum dropped;
  for (const auto& e : v.entries()) {
    if (e.index < policy.cutoff) {
      kept.push_back(e);
    } else {
      dropped.add(e.value * e.value);
    }
  }
  const double tail = v.tail_bound() + std::sqrt(dropped.value());
  if (tail > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge, "truncation tail " + std::to_string(tail) +
                                             " exceeds max_tail " +
                                             std::to_string(policy.max_tail));
  }
  return Element::from_entries(std::move(kept), tail);
}

}  // namespace hevo
