// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "hevo/algebra.hpp"

namespace hevo {

/// C(v) = sum_k (sum_i v_i c_ki) e_k, so C(e_i) = e_i^2.
///
/// An input tail is propagated through s.metadata().norm_bound; without one
/// the image of the tail is unbounded and TailTooLarge is raised.
Element evolution_apply(const StructureMap& s, const Element& v, const TruncationPolicy& policy);

/// Outcome of the domain test. Never claims non-membership.
struct DomainVerdict {
  bool within_cutoff = false;
  /// Upper bound on sum_k |sum_i v_i c_ki|^2 when within_cutoff.
  double bound = 0.0;
  double partial_sum = 0.0;
  std::string diagnostic;
};

DomainVerdict in_domain(const StructureMap& s, const Element& v, const TruncationPolicy& policy);

/// Strictly positive Schur weights. Unit weights let certificates use the
/// map's uniform l1 metadata for tails; any other oracle only certifies
/// finite-extent maps.
class Weights {
 public:
  static Weights unit();
  static Weights from_function(std::function<double(BasisIndex)> fn);
  /// Weight of index i is the coefficient stored at i (0 when absent).
  static Weights from_element(const Element& w);

  /// Throws InvalidWeights if the weight is not strictly positive and finite.
  double operator()(BasisIndex i) const;
  bool is_unit() const noexcept { return !fn_; }

 private:
  std::function<double(BasisIndex)> fn_;
};

struct HilbertSchmidt {
  double hs_sum = 0.0;
};

struct Schur {
  Weights alpha;
  Weights beta;
  double m1 = 0.0;
  double m2 = 0.0;
};

struct RowSum {
  double m = 0.0;
};

struct Inconclusive {
  std::string diagnostic;
  /// The offending partial sum and where it was found.
  BasisIndex at = 0;
  double partial_sum = 0.0;
};

/// Evidence that C is bounded. norm_bound is present exactly when the variant
/// is not Inconclusive. measured_sup is the largest in-window sum the check
/// actually computed (diagnostic only; M constants include tail metadata).
struct Certificate {
  std::variant<HilbertSchmidt, Schur, RowSum, Inconclusive> verdict;
  std::optional<double> norm_bound;
  std::size_t cutoff_used = 0;
  double measured_sup = 0.0;

  bool certified() const noexcept { return norm_bound.has_value(); }
  std::string variant_name() const;
};

/// "CERTIFIED <variant> norm_bound=<x> cutoff=<N>" or "INCONCLUSIVE <diagnostic>".
std::string render(const Certificate& c);

Certificate certify_hilbert_schmidt(const StructureMap& s, const TruncationPolicy& policy);

/// Schur test: sum_k |c_ki| alpha_k <= M1 beta_i and sum_i |c_ki| beta_i <= M2 alpha_k
/// give ||C|| <= sqrt(M1 M2).
Certificate certify_schur(const StructureMap& s, const Weights& alpha, const Weights& beta,
                          const TruncationPolicy& policy);

/// Markov structure maps only (NotMarkov otherwise): m = sup_k sum_i p_ik,
/// ||C|| <= sqrt(m).
Certificate certify_rowsum(const StructureMap& s, const TruncationPolicy& policy);

enum class TailPropagation {
  /// MissingCertificate when a nonzero tail meets an unknown operator norm.
  Require,
  /// Keep going and report tail_certified = false.
  BestEffort,
};

struct PowerResult {
  Element value;
  bool tail_certified = true;
};

/// n-fold composition of evolution_apply. Each step multiplies the carried
/// tail by the norm bound (argument, else the map's metadata) and adds the
/// new column truncation tail.
PowerResult power_apply(const StructureMap& s, const Element& v, std::size_t n,
                        const TruncationPolicy& policy,
                        std::optional<double> norm_bound = std::nullopt,
                        TailPropagation mode = TailPropagation::Require);

/// max over `trials` random finitely supported unit vectors v of ||C(v)||.
/// Reproducible for a given seed.
double empirical_norm_lower_bound(const StructureMap& s, std::size_t trials, std::uint64_t seed,
                                  const TruncationPolicy& policy);

}  // namespace hevo
