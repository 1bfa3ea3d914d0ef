// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hevo/algebra.hpp"
#include "hevo/element.hpp"

namespace hevo {

/// Outgoing law of one state under a cutoff: p_ik for k < cutoff (ascending,
/// unique) and the certified mass of the transitions to k >= cutoff.
struct Row {
  std::vector<Entry> entries;
  double tail_mass = 0.0;
};

struct KernelMetadata {
  /// Exact l1 mass of the full row; 1 for an honest kernel.
  std::function<double(BasisIndex)> row_mass;
  /// All transitions stay within states < extent.
  std::optional<std::size_t> extent;
  /// Certified sup_k sum_i p_ik for the whole chain.
  std::optional<double> column_mass_sup;
  StructureKind kind = StructureKind::LazyFormula;
};

/// Row oracle i -> {p_ik} of a countable-state Markov chain. Immutable;
/// copies share the oracle.
class TransitionKernel {
 public:
  using RowOracle = std::function<Row(BasisIndex i, std::size_t cutoff)>;

  TransitionKernel(RowOracle oracle, KernelMetadata metadata, std::string description);

  Row row(BasisIndex i, std::size_t cutoff) const { return oracle_(i, cutoff); }
  double row_mass(BasisIndex i) const;
  const KernelMetadata& metadata() const noexcept { return metadata_; }
  const std::string& description() const noexcept { return description_; }

 private:
  RowOracle oracle_;
  KernelMetadata metadata_;
  std::string description_;
};

struct KernelViolation {
  BasisIndex state = 0;
  std::string message;
};

struct KernelReport {
  std::size_t states_checked = 0;
  std::vector<KernelViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks entry ranges, duplicates and row sums of the first `states`
/// states (capped by the kernel's extent).
KernelReport validate_kernel(const TransitionKernel& k, std::size_t states,
                             const TruncationPolicy& policy);

/// c_ki := p_ik. Column i of the result is row i of the kernel; column masses
/// are the row masses. Validates the states below min(cutoff, extent) first
/// and throws NotMarkov on any violation.
StructureMap to_structure_map(const TransitionKernel& k, const TruncationPolicy& policy = {});

/// A probability law on the states, truncated: coefficients in [0,1] plus the
/// mass lost past the cutoff.
class Distribution {
 public:
  /// Throws InvalidParameter unless every coefficient is in [0,1] and
  /// sum + deficit = 1 within tol.
  Distribution(Element underlying, double mass_deficit, double tol = 1e-9);

  static Distribution point_mass(BasisIndex i);

  const Element& underlying() const noexcept { return underlying_; }
  double mass_deficit() const noexcept { return mass_deficit_; }
  double probability(BasisIndex i) const noexcept { return underlying_.coefficient(i); }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Element underlying_;
  double mass_deficit_;
};

/// p_ik^(n) for fixed i, computed by pushing the row vector through the
/// truncated kernel.
struct NStepTable {
  BasisIndex from = 0;
  std::size_t horizon = 0;
  std::vector<Entry> probabilities;
  double deficit = 0.0;

  double probability(BasisIndex k) const noexcept;
};

/// Brute-force n-step law, independent of the algebra code path. Throws
/// TailTooLarge if the deficit exceeds max_tail.
NStepTable nstep_oracle(const TransitionKernel& k, BasisIndex from, std::size_t n,
                        const TruncationPolicy& policy);

/// C^n(v) for v the initial law: coefficient i approximates P(X_n = i) from
/// below, with error at most the mass deficit. Throws TailTooLarge if the
/// deficit exceeds max_tail.
Distribution evolve_distribution(const TransitionKernel& k, const Distribution& init, std::size_t n,
                                 const TruncationPolicy& policy);

struct SimulationResult {
  std::size_t paths = 0;
  /// Paths that entered the residual bucket of a truncated row (or started
  /// in the initial law's deficit).
  std::size_t escaped = 0;
  std::map<BasisIndex, std::size_t> counts;

  /// counts[k] / paths.
  double frequency(BasisIndex k) const noexcept;
};

/// Monte Carlo walk of `paths` chains for n steps. Path p draws its initial
/// state from stream (seed, p, 0) and step t from (seed, p, t), so results do
/// not depend on the thread count.
SimulationResult simulate(const TransitionKernel& k, const Distribution& init, std::size_t n,
                          std::size_t paths, std::uint64_t seed, const TruncationPolicy& policy,
                          unsigned threads = 0);

/// A probability sequence p_0, p_1, ... with exact tail masses.
class ProbabilitySequence {
 public:
  /// p_i = (1-q) q^(i-offset) for i >= offset, 0 below; sums to 1.
  static ProbabilitySequence geometric(double q, BasisIndex offset);
  /// p_i = p for every i; the total is infinite.
  static ProbabilitySequence constant(double p);
  /// p_i = values[i], 0 past the end.
  static ProbabilitySequence finite(std::vector<double> values);

  double operator()(BasisIndex i) const { return term_(i); }
  /// sum_{i >= n} p_i, or nullopt when it diverges.
  std::optional<double> tail_from(BasisIndex n) const { return tail_(n); }
  const std::string& description() const noexcept { return description_; }

 private:
  std::function<double(BasisIndex)> term_;
  std::function<std::optional<double>(BasisIndex)> tail_;
  std::string description_;
};

/// p_ii = 1.
TransitionKernel build_identity();

/// Row 0 = {i: p_i}_{i>=1}, row i = {i-1: 1}. NotMarkov unless the sequence
/// sums to 1 from index 1.
TransitionKernel build_renewal(const ProbabilitySequence& p);

/// Row i = {0: p_i, i+1: 1 - p_i}. InvalidParameter if a queried p_i is
/// outside (0, 1].
TransitionKernel build_house_of_cards(const ProbabilitySequence& p);

/// Galton-Watson chain: row i is the i-fold convolution of the offspring law,
/// row 0 is absorbing. Rows up to max_population are memoized.
TransitionKernel build_branching(std::vector<double> offspring, std::size_t max_population = 256);

/// A finite chain given by (i, k, p_ik) triples; states without a row get an
/// empty (invalid) row.
TransitionKernel build_from_triples(const std::map<BasisIndex, std::vector<Entry>>& rows);

/// max{p_0/(1-p_0), s^{-1} phi(s)/(1-phi(s))} with phi the offspring pgf.
double branching_column_bound(std::span<const double> offspring, double s);

}  // namespace hevo
