// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#include "hevo/markov.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <unordered_map>

#include "hevo/compensated_sum.hpp"
#include "hevo/error.hpp"
#include "hevo/evolution_operator.hpp"
#include "hevo/rng.hpp"
#include "hevo/text_format.hpp"

namespace hevo {

TransitionKernel::TransitionKernel(RowOracle oracle, KernelMetadata metadata,
                                   std::string description)
    : oracle_(std::move(oracle)), metadata_(std::move(metadata)),
      description_(std::move(description)) {
  if (!metadata_.row_mass) metadata_.row_mass = [](BasisIndex) { return 1.0; };
}

double TransitionKernel::row_mass(BasisIndex i) const { return metadata_.row_mass(i); }

KernelReport validate_kernel(const TransitionKernel& k, std::size_t states,
                             const TruncationPolicy& policy) {
  policy.validate();
  KernelReport report;
  const auto& extent = k.metadata().extent;
  const std::size_t n = extent ? std::min(states, *extent) : states;
  const double tol = policy.abs_tol;
  for (BasisIndex i = 0; i < n; ++i) {
    auto flag = [&](std::string msg) { report.violations.push_back({i, std::move(msg)}); };
    Row row;
    try {
      row = k.row(i, policy.cutoff);
    } catch (const Error& e) {
      flag(e.what());
      continue;
    }
    CompensatedSum in_window;
    for (std::size_t j = 0; j < row.entries.size(); ++j) {
      const Entry& e = row.entries[j];
      if (!std::isfinite(e.value) || e.value < 0.0 || e.value > 1.0 + tol) {
        flag("p_" + std::to_string(i) + "," + std::to_string(e.index) + " = " +
             format_double(e.value) + " is outside [0, 1]");
      }
      if (j > 0 && e.index <= row.entries[j - 1].index) {
        flag("target " + std::to_string(e.index) + " repeated or out of order");
      }
      if (e.index >= policy.cutoff) {
        flag("target " + std::to_string(e.index) + " lies past the cutoff");
      }
      in_window.add(e.value);
    }
    if (!std::isfinite(row.tail_mass) || row.tail_mass < 0.0) {
      flag("tail mass " + format_double(row.tail_mass) + " is not a nonnegative number");
      continue;
    }
    if (in_window.value() > 1.0 + tol) {
      flag("truncated row sums to " + format_double(in_window.value()) + " > 1");
    }
    const double declared = k.row_mass(i);
    if (std::abs(declared - 1.0) > tol) {
      flag("declared row mass " + format_double(declared) + " is not 1");
    }
    CompensatedSum total = in_window;
    total.add(row.tail_mass);
    if (std::abs(total.value() - declared) > tol) {
      flag("row sums to " + format_double(total.value()) + " but its mass is " +
           format_double(declared));
    }
  }
  report.states_checked = n;
  return report;
}

StructureMap to_structure_map(const TransitionKernel& k, const TruncationPolicy& policy) {
  const auto& md = k.metadata();
  const std::size_t check = md.extent ? std::min(policy.cutoff, *md.extent) : policy.cutoff;
  auto report = validate_kernel(k, check, policy);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::NotMarkov,
                "state " + std::to_string(v.state) + ": " + v.message + " (" +
                    std::to_string(report.violations.size()) + " violation(s))");
  }

  if (md.kind == StructureKind::ExplicitSparse && md.extent) {
    std::map<BasisIndex, std::vector<Entry>> columns;
    for (BasisIndex i = 0; i < *md.extent; ++i) {
      Row r = k.row(i, *md.extent);
      if (!r.entries.empty()) columns[i] = std::move(r.entries);
    }
    return StructureMap::explicit_sparse(std::move(columns));
  }

  StructureMetadata smd;
  smd.extent = md.extent;
  smd.column_l1 = md.row_mass;
  smd.column_l1_sup = 1.0;
  smd.row_l1_sup = md.column_mass_sup;
  smd.column_l2_sup = 1.0;
  smd.unit_bounded = true;
  return StructureMap::lazy(
      [k](BasisIndex i, std::size_t cutoff) {
        Row r = k.row(i, cutoff);
        return RawColumn{std::move(r.entries), r.tail_mass};
      },
      std::move(smd));
}

Distribution::Distribution(Element underlying, double mass_deficit, double tol)
    : mass_deficit_(std::max(0.0, mass_deficit)) {
  if (!std::isfinite(mass_deficit) || mass_deficit < -tol) {
    throw Error(ErrorCode::InvalidParameter, "mass deficit must be nonnegative");
  }
  for (const auto& e : underlying.entries()) {
    if (e.value < -tol || e.value > 1.0 + tol) {
      throw Error(ErrorCode::InvalidParameter, "probability at state " + std::to_string(e.index) +
                                                   " is outside [0, 1]");
    }
  }
  const double total = underlying.sum() + mass_deficit_;
  if (std::abs(total - 1.0) > tol) {
    throw Error(ErrorCode::InvalidParameter,
                "probabilities plus deficit sum to " + format_double(total) + ", not 1");
  }
  // The omitted part is nonnegative with l1 mass equal to the deficit, so the
  // deficit is also a certified l2 tail.
  underlying_ = underlying.with_tail_bound(mass_deficit_);
}

Distribution Distribution::point_mass(BasisIndex i) { return Distribution(Element::basis(i), 0.0); }

double NStepTable::probability(BasisIndex k) const noexcept {
  auto it = std::lower_bound(probabilities.begin(), probabilities.end(), k,
                             [](const Entry& e, BasisIndex idx) { return e.index < idx; });
  return (it != probabilities.end() && it->index == k) ? it->value : 0.0;
}

NStepTable nstep_oracle(const TransitionKernel& k, BasisIndex from, std::size_t n,
                        const TruncationPolicy& policy) {
  policy.validate();
  NStepTable table;
  table.from = from;
  table.horizon = n;
  if (n == 0) {
    table.probabilities = {{from, 1.0}};
    return table;
  }
  if (from >= policy.cutoff) {
    throw Error(ErrorCode::TailTooLarge, "start state lies outside the truncation window");
  }

  const std::size_t size = policy.cutoff;
  std::unordered_map<BasisIndex, Row> rows;
  std::vector<double> current(size, 0.0);
  std::vector<double> next(size, 0.0);
  current[from] = 1.0;
  CompensatedSum deficit;
  for (std::size_t step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j < size; ++j) {
      const double mass = current[j];
      if (mass == 0.0) continue;
      auto it = rows.find(j);
      if (it == rows.end()) it = rows.emplace(j, k.row(j, size)).first;
      for (const auto& e : it->second.entries) {
        if (e.index < size) {
          next[e.index] += mass * e.value;
        } else {
          deficit.add(mass * e.value);
        }
      }
      deficit.add(mass * it->second.tail_mass);
    }
    std::swap(current, next);
  }
  for (std::size_t j = 0; j < size; ++j) {
    if (current[j] != 0.0) table.probabilities.push_back({j, current[j]});
  }
  table.deficit = deficit.value();
  if (table.deficit > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge, "n-step deficit " + format_double(table.deficit) +
                                             " exceeds max_tail");
  }
  return table;
}

Distribution evolve_distribution(const TransitionKernel& k, const Distribution& init, std::size_t n,
                                 const TruncationPolicy& policy) {
  policy.validate();
  const StructureMap s = to_structure_map(k, policy);
  const Element start = init.underlying().with_tail_bound(0.0);
  auto result = power_apply(s, start, n, policy, std::nullopt, TailPropagation::BestEffort);
  const double deficit =
      std::max(0.0, init.mass_deficit() + (start.sum() - result.value.sum()));
  if (deficit > policy.max_tail) {
    throw Error(ErrorCode::TailTooLarge,
                "mass deficit " + format_double(deficit) + " exceeds max_tail");
  }
  return Distribution(result.value.with_tail_bound(0.0), deficit, policy.abs_tol);
}

double SimulationResult::frequency(BasisIndex k) const noexcept {
  auto it = counts.find(k);
  if (it == counts.end() || paths == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(paths);
}

namespace {

struct CumulativeRow {
  std::vector<BasisIndex> states;
  std::vector<double> cumulative;
};

CumulativeRow cumulate(std::span<const Entry> entries) {
  CumulativeRow out;
  double acc = 0.0;
  for (const auto& e : entries) {
    if (e.value <= 0.0) continue;
    acc += e.value;
    out.states.push_back(e.index);
    out.cumulative.push_back(acc);
  }
  return out;
}

// Index into the row, or nullopt for the residual bucket.
std::optional<BasisIndex> sample(const CumulativeRow& row, double u) {
  auto it = std::upper_bound(row.cumulative.begin(), row.cumulative.end(), u);
  if (it == row.cumulative.end()) return std::nullopt;
  return row.states[static_cast<std::size_t>(it - row.cumulative.begin())];
}

}  // namespace

SimulationResult simulate(const TransitionKernel& k, const Distribution& init, std::size_t n,
                          std::size_t paths, std::uint64_t seed, const TruncationPolicy& policy,
                          unsigned threads) {
  policy.validate();
  if (paths < 1) throw Error(ErrorCode::InvalidParameter, "paths must be >= 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, paths));

  const CumulativeRow initial = cumulate(init.underlying().entries());

  struct Partial {
    std::map<BasisIndex, std::size_t> counts;
    std::size_t escaped = 0;
    std::exception_ptr error;
  };
  std::vector<Partial> partials(threads);

  auto worker = [&](unsigned t) {
    Partial& out = partials[t];
    try {
      std::unordered_map<BasisIndex, CumulativeRow> rows;
      const std::size_t begin = paths * t / threads;
      const std::size_t end = paths * (t + 1) / threads;
      for (std::size_t p = begin; p < end; ++p) {
        CounterStream start(seed, p, 0);
        auto state = sample(initial, start.uniform());
        for (std::size_t step = 1; state && step <= n; ++step) {
          auto it = rows.find(*state);
          if (it == rows.end()) {
            it = rows.emplace(*state, cumulate(k.row(*state, policy.cutoff).entries)).first;
          }
          CounterStream rng(seed, p, static_cast<std::uint32_t>(step));
          state = sample(it->second, rng.uniform());
        }
        if (state) {
          ++out.counts[*state];
        } else {
          ++out.escaped;
        }
      }
    } catch (...) {
      out.error = std::current_exception();
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  SimulationResult result;
  result.paths = paths;
  for (auto& part : partials) {
    if (part.error) std::rethrow_exception(part.error);
    result.escaped += part.escaped;
    for (const auto& [state, count] : part.counts) result.counts[state] += count;
  }
  return result;
}

}  // namespace hevo
