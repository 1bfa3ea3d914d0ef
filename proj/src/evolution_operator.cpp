// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#include "hevo/evolution_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hevo/compensated_sum.hpp"
#include "hevo/error.hpp"
#include "hevo/rng.hpp"
#include "hevo/text_format.hpp"

namespace hevo {
namespace {

detail::Accumulated apply_columns(const StructureMap& s, const Element& v, std::size_t cutoff) {
  std::vector<Column> columns;
  std::vector<double> weights;
  columns.reserve(v.support_size());
  for (const auto& e : v.entries()) {
    columns.push_back(s.column(e.index, cutoff));
    weights.push_back(e.value);
  }
  std::vector<const Column*> ptrs;
  ptrs.reserve(columns.size());
  for (const auto& c : columns) ptrs.push_back(&c);
  return detail::accumulate_columns(weights, ptrs);
}

// Either a certified supremum or the reason it could not be certified.
struct SupResult {
  std::optional<double> value;
  double measured = 0.0;
  Inconclusive failure;
};

bool finite_within(const StructureMap& s, std::size_t cutoff) {
  const auto& extent = s.metadata().extent;
  return extent && *extent <= cutoff;
}

std::size_t scan_limit(const StructureMap& s, std::size_t cutoff) {
  return finite_within(s, cutoff) ? *s.metadata().extent : cutoff;
}

// M1 = sup_i (sum_k |c_ki| alpha_k) / beta_i.
SupResult column_sup(const StructureMap& s, const std::vector<Column>& columns,
                     const Weights& alpha, const Weights& beta, std::size_t cutoff) {
  SupResult r;
  const bool finite = finite_within(s, cutoff);
  double sup = 0.0;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Column& col = columns[i];
    CompensatedSum sum;
    for (const auto& e : col.entries) sum.add(std::abs(e.value) * alpha(e.index));
    if (!finite) {
      if (!col.tail_l1) {
        r.failure = {"column " + std::to_string(i) + " has no certified tail", i, sum.value()};
        return r;
      }
      if (*col.tail_l1 > 0.0) {
        if (!alpha.is_unit()) {
          r.failure = {"weighted tail of column " + std::to_string(i) + " cannot be bounded", i,
                       sum.value()};
          return r;
        }
        sum.add(*col.tail_l1);
      }
    }
    sup = std::max(sup, sum.value() / beta(i));
  }
  r.measured = sup;
  if (!finite) {
    const auto& md = s.metadata();
    if (!alpha.is_unit() || !beta.is_unit() || !md.column_l1_sup) {
      r.failure = {"no certified bound on column masses past the cutoff", cutoff, sup};
      return r;
    }
    if (sup > *md.column_l1_sup * (1.0 + 1e-12) + 1e-12) {
      r.failure = {"measured column mass " + format_double(sup) +
                       " exceeds the map's declared bound " + format_double(*md.column_l1_sup),
                   cutoff, sup};
      return r;
    }
    sup = std::max(sup, *md.column_l1_sup);
  }
  r.value = sup;
  return r;
}

// M2 = sup_k (sum_i |c_ki| beta_i) / alpha_k, i.e. the row sums of the
// structure constants (column sums of a kernel).
SupResult row_sup(const StructureMap& s, const std::vector<Column>& columns, const Weights& alpha,
                  const Weights& beta, std::size_t cutoff, double abs_tol) {
  SupResult r;
  const bool finite = finite_within(s, cutoff);
  const std::size_t limit = columns.size();
  const std::size_t half = (limit + 1) / 2;
  std::vector<CompensatedSum> rows(limit);
  std::vector<CompensatedSum> rows_half(limit);
  for (std::size_t i = 0; i < limit; ++i) {
    const double b = beta(i);
    for (const auto& e : columns[i].entries) {
      if (e.index >= limit) continue;
      rows[e.index].add(std::abs(e.value) * b);
      if (i < half) rows_half[e.index].add(std::abs(e.value) * b);
    }
  }
  double sup = 0.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < limit; ++k) {
    const double x = rows[k].value() / alpha(k);
    if (x > sup) {
      sup = x;
      arg = k;
    }
  }
  r.measured = sup;
  if (finite) {
    r.value = sup;
    return r;
  }
  const auto& md = s.metadata();
  if (alpha.is_unit() && beta.is_unit() && md.row_l1_sup) {
    if (sup > *md.row_l1_sup + abs_tol) {
      r.failure = {"measured row sum " + format_double(sup) + " at index " + std::to_string(arg) +
                       " exceeds the declared bound " + format_double(*md.row_l1_sup),
                   arg, sup};
      return r;
    }
    r.value = std::max(sup, *md.row_l1_sup);
    return r;
  }
  const double earlier = limit > 0 ? rows_half[arg].value() / alpha(arg) : 0.0;
  std::ostringstream msg;
  msg << "row sum sum_i |c_ki| beta_i at k=" << arg << " over i<" << limit << " is "
      << format_double(sup) << " (" << format_double(earlier) << " over i<" << half << "): "
      << (sup > earlier + abs_tol ? "still growing" : "not growing")
      << "; no certified bound past the cutoff";
  r.failure = {msg.str(), arg, sup};
  return r;
}

std::vector<Column> scan_columns(const StructureMap& s, std::size_t limit, std::size_t cutoff) {
  std::vector<Column> columns;
  columns.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) columns.push_back(s.column(i, cutoff));
  return columns;
}

Certificate inconclusive(Inconclusive failure, std::size_t cutoff, double measured) {
  Certificate c;
  c.verdict = std::move(failure);
  c.cutoff_used = cutoff;
  c.measured_sup = measured;
  return c;
}

}  // namespace

Element evolution_apply(const StructureMap& s, const Element& v, const TruncationPolicy& policy) {
  policy.validate();
  if (v.tail_bound() > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge, "input tail exceeds max_tail");
  }
  auto acc = apply_columns(s, v, policy.cutoff);
  if (!acc.column_tail) {
    throw Error(ErrorCode::TailTooLarge, "a touched column has no certified tail");
  }
  double tail = *acc.column_tail;
  if (v.tail_bound() > 0.0) {
    const auto& nb = s.metadata().norm_bound;
    if (!nb) {
      throw Error(ErrorCode::TailTooLarge,
                  "input tail cannot be propagated without a certified norm bound");
    }
    tail += *nb * v.tail_bound();
  }
  if (tail > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge,
                "result tail " + format_double(tail) + " exceeds max_tail");
  }
  return Element::from_entries(std::move(acc.entries), tail);
}

DomainVerdict in_domain(const StructureMap& s, const Element& v, const TruncationPolicy& policy) {
  policy.validate();
  DomainVerdict out;
  auto acc = apply_columns(s, v, policy.cutoff);
  const std::size_t half = (policy.cutoff + 1) / 2;
  CompensatedSum partial;
  CompensatedSum partial_half;
  for (const auto& e : acc.entries) {
    partial.add(e.value * e.value);
    if (e.index < half) partial_half.add(e.value * e.value);
  }
  out.partial_sum = partial.value();
  if (!acc.column_tail) {
    std::ostringstream msg;
    msg << "partial sum " << format_double(out.partial_sum) << " over k<" << policy.cutoff << " ("
        << format_double(partial_half.value()) << " over k<" << half << ")"
        << (out.partial_sum > partial_half.value() + policy.abs_tol ? ", still growing" : "")
        << "; a touched column has no certified tail";
    out.diagnostic = msg.str();
    return out;
  }
  double image_of_tail = 0.0;
  if (v.tail_bound() > 0.0) {
    const auto& nb = s.metadata().norm_bound;
    if (!nb) {
      out.diagnostic = "input has a tail and the operator has no certified norm bound";
      return out;
    }
    image_of_tail = *nb * v.tail_bound();
  }
  const double stored = std::sqrt(out.partial_sum + *acc.column_tail * *acc.column_tail);
  out.within_cutoff = true;
  out.bound = (stored + image_of_tail) * (stored + image_of_tail);
  return out;
}

Weights Weights::unit() { return Weights{}; }

Weights Weights::from_function(std::function<double(BasisIndex)> fn) {
  Weights w;
  w.fn_ = std::move(fn);
  return w;
}

Weights Weights::from_element(const Element& e) {
  return from_function([e](BasisIndex i) { return e.coefficient(i); });
}

double Weights::operator()(BasisIndex i) const {
  if (!fn_) return 1.0;
  const double x = fn_(i);
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::InvalidWeights,
                "weight at index " + std::to_string(i) + " is not strictly positive");
  }
  return x;
}

std::string Certificate::variant_name() const {
  struct Namer {
    std::string operator()(const HilbertSchmidt&) const { return "HilbertSchmidt"; }
    std::string operator()(const Schur&) const { return "Schur"; }
    std::string operator()(const RowSum&) const { return "RowSum"; }
    std::string operator()(const Inconclusive&) const { return "None"; }
  };
  return std::visit(Namer{}, verdict);
}

std::string render(const Certificate& c) {
  if (const auto* none = std::get_if<Inconclusive>(&c.verdict)) {
    return "INCONCLUSIVE " + none->diagnostic;
  }
  return "CERTIFIED " + c.variant_name() + " norm_bound=" + format_double(*c.norm_bound) +
         " cutoff=" + std::to_string(c.cutoff_used);
}

Certificate certify_hilbert_schmidt(const StructureMap& s, const TruncationPolicy& policy) {
  policy.validate();
  const std::size_t cutoff = policy.cutoff;
  const std::size_t limit = scan_limit(s, cutoff);
  CompensatedSum hs;
  for (std::size_t i = 0; i < limit; ++i) {
    for (const auto& e : s.column(i, cutoff).entries) hs.add(e.value * e.value);
  }
  const double sum = hs.value();
  if (!finite_within(s, cutoff)) {
    return inconclusive({"Hilbert-Schmidt partial sum " + format_double(sum) + " over " +
                             std::to_string(limit) +
                             " columns; no certified bound on the remaining columns",
                         limit, sum},
                        cutoff, sum);
  }
  Certificate c;
  c.verdict = HilbertSchmidt{sum};
  c.norm_bound = std::sqrt(sum);
  c.cutoff_used = cutoff;
  c.measured_sup = sum;
  return c;
}

Certificate certify_schur(const StructureMap& s, const Weights& alpha, const Weights& beta,
                          const TruncationPolicy& policy) {
  policy.validate();
  const std::size_t cutoff = policy.cutoff;
  const auto columns = scan_columns(s, scan_limit(s, cutoff), cutoff);
  auto m1 = column_sup(s, columns, alpha, beta, cutoff);
  if (!m1.value) return inconclusive(std::move(m1.failure), cutoff, m1.measured);
  auto m2 = row_sup(s, columns, alpha, beta, cutoff, policy.abs_tol);
  if (!m2.value) return inconclusive(std::move(m2.failure), cutoff, m2.measured);

  Certificate c;
  c.verdict = Schur{alpha, beta, *m1.value, *m2.value};
  c.norm_bound = std::sqrt(*m1.value * *m2.value);
  c.cutoff_used = cutoff;
  c.measured_sup = m2.measured;
  return c;
}

Certificate certify_rowsum(const StructureMap& s, const TruncationPolicy& policy) {
  policy.validate();
  const std::size_t cutoff = policy.cutoff;
  const auto columns = scan_columns(s, scan_limit(s, cutoff), cutoff);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    CompensatedSum mass;
    for (const auto& e : columns[i].entries) {
      if (e.value < 0.0) {
        throw Error(ErrorCode::NotMarkov, "negative structure constant in column " +
                                              std::to_string(i));
      }
      mass.add(e.value);
    }
    if (!columns[i].tail_l1) {
      throw Error(ErrorCode::NotMarkov,
                  "column " + std::to_string(i) + " mass cannot be verified past the cutoff");
    }
    mass.add(*columns[i].tail_l1);
    if (std::abs(mass.value() - 1.0) > policy.abs_tol) {
      throw Error(ErrorCode::NotMarkov, "column " + std::to_string(i) + " sums to " +
                                            format_double(mass.value()) + ", not 1");
    }
  }
  const Weights unit = Weights::unit();
  auto m = row_sup(s, columns, unit, unit, cutoff, policy.abs_tol);
  if (!m.value) return inconclusive(std::move(m.failure), cutoff, m.measured);

  Certificate c;
  c.verdict = RowSum{*m.value};
  c.norm_bound = std::sqrt(*m.value);
  c.cutoff_used = cutoff;
  c.measured_sup = m.measured;
  return c;
}

PowerResult power_apply(const StructureMap& s, const Element& v, std::size_t n,
                        const TruncationPolicy& policy, std::optional<double> norm_bound,
                        TailPropagation mode) {
  policy.validate();
  if (v.tail_bound() > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge, "input tail exceeds max_tail");
  }
  if (!norm_bound) norm_bound = s.metadata().norm_bound;
  const bool require = mode == TailPropagation::Require;

  PowerResult out{v, true};
  for (std::size_t step = 0; step < n; ++step) {
    const double carried = out.value.tail_bound();
    auto acc = apply_columns(s, out.value, policy.cutoff);
    double tail = 0.0;
    if (acc.column_tail) {
      tail = *acc.column_tail;
    } else if (require) {
      throw Error(ErrorCode::TailTooLarge, "a touched column has no certified tail");
    } else {
      out.tail_certified = false;
    }
    if (carried > 0.0) {
      if (norm_bound) {
        tail += *norm_bound * carried;
      } else if (require) {
        throw Error(ErrorCode::MissingCertificate,
                    "tail propagation needs a certified norm bound");
      } else {
        out.tail_certified = false;
      }
    }
    if (require && tail > policy.max_tail) {
      throw Error(ErrorCode::TailTooLarge, "tail " + format_double(tail) + " after step " +
                                               std::to_string(step + 1) + " exceeds max_tail");
    }
    if (!std::isfinite(tail)) {
      throw Error(ErrorCode::NonFiniteCoefficient, "tail overflowed");
    }
    out.value = Element::from_entries(std::move(acc.entries), tail);
  }
  return out;
}

double empirical_norm_lower_bound(const StructureMap& s, std::size_t trials, std::uint64_t seed,
                                  const TruncationPolicy& policy) {
  policy.validate();
  if (trials < 1) throw Error(ErrorCode::InvalidParameter, "trials must be >= 1");
  const auto& extent = s.metadata().extent;
  const std::size_t window =
      std::max<std::size_t>(1, std::min<std::size_t>(policy.cutoff, extent ? *extent : 16));
  const std::size_t max_support = std::min<std::size_t>(window, 8);

  double best = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterStream rng(seed, t, 0);
    const std::size_t d = 1 + static_cast<std::size_t>(rng.uniform() * max_support) % max_support;
    // Partial Fisher-Yates over the window.
    std::vector<BasisIndex> pool(window);
    std::iota(pool.begin(), pool.end(), BasisIndex{0});
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t pick =
          j + static_cast<std::size_t>(rng.uniform() * (window - j)) % (window - j);
      std::swap(pool[j], pool[pick]);
      entries.push_back({pool[j], rng.normal()});
    }
    Element v = Element::from_entries(std::move(entries));
    const double nv = std::sqrt(v.squared_norm());
    if (nv == 0.0) continue;
    v = axpy(1.0 / nv - 1.0, v, v);
    auto acc = apply_columns(s, v, policy.cutoff);
    CompensatedSum sq;
    for (const auto& e : acc.entries) sq.add(e.value * e.value);
    best = std::max(best, std::sqrt(sq.value()));
  }
  return best;
}

}  // namespace hevo
