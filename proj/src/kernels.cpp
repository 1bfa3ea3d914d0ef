// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <memory>

#include "hevo/compensated_sum.hpp"
#include "hevo/error.hpp"
#include "hevo/markov.hpp"
#include "hevo/text_format.hpp"

namespace hevo {
namespace {

constexpr double kSequenceTol = 1e-12;

void check_offspring(std::span<const double> offspring) {
  if (offspring.size() < 2) {
    throw Error(ErrorCode::InvalidParameter, "offspring law needs at least p_0 and p_1");
  }
  CompensatedSum total;
  for (double p : offspring) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::InvalidParameter, "offspring probability outside [0, 1]");
    }
    total.add(p);
  }
  if (!(offspring[0] > 0.0 && offspring[0] < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "p_0 must lie in (0, 1)");
  }
  if (std::abs(total.value() - 1.0) > kSequenceTol) {
    throw Error(ErrorCode::InvalidParameter,
                "offspring law sums to " + format_double(total.value()));
  }
}

// Full law of the sum of `population` offspring counts.
using Convolution = std::vector<double>;

Convolution convolve(const Convolution& law, std::span<const double> offspring) {
  const std::size_t d = offspring.size() - 1;
  Convolution out(law.size() + d, 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    CompensatedSum sum;
    const std::size_t j_lo = k >= law.size() ? k - (law.size() - 1) : 0;
    const std::size_t j_hi = std::min(k, d);
    for (std::size_t j = j_lo; j <= j_hi; ++j) sum.add(law[k - j] * offspring[j]);
    out[k] = sum.value();
  }
  return out;
}

Row row_from_law(const Convolution& law, std::size_t cutoff) {
  Row row;
  CompensatedSum tail;
  for (std::size_t k = 0; k < law.size(); ++k) {
    if (law[k] == 0.0) continue;
    if (k < cutoff) {
      row.entries.push_back({k, law[k]});
    } else {
      tail.add(law[k]);
    }
  }
  row.tail_mass = tail.value();
  return row;
}

}  // namespace

ProbabilitySequence ProbabilitySequence::geometric(double q, BasisIndex offset) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "geometric ratio must lie in (0, 1)");
  }
  ProbabilitySequence p;
  p.term_ = [q, offset](BasisIndex i) {
    return i < offset ? 0.0 : (1.0 - q) * std::pow(q, static_cast<double>(i - offset));
  };
  p.tail_ = [q, offset](BasisIndex n) -> std::optional<double> {
    return n <= offset ? 1.0 : std::pow(q, static_cast<double>(n - offset));
  };
  p.description_ = "geometric " + format_double(q);
  return p;
}

ProbabilitySequence ProbabilitySequence::constant(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "constant sequence value must be >= 0");
  }
  ProbabilitySequence p;
  p.term_ = [value](BasisIndex) { return value; };
  p.tail_ = [value](BasisIndex) -> std::optional<double> {
    if (value == 0.0) return 0.0;
    return std::nullopt;
  };
  p.description_ = "constant " + format_double(value);
  return p;
}

ProbabilitySequence ProbabilitySequence::finite(std::vector<double> values) {
  for (double x : values) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorCode::InvalidParameter, "sequence terms must be finite and >= 0");
    }
  }
  auto suffix = std::make_shared<std::vector<double>>(values.size() + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t j = values.size(); j-- > 0;) {
    acc.add(values[j]);
    (*suffix)[j] = acc.value();
  }
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  ProbabilitySequence p;
  p.term_ = [shared](BasisIndex i) { return i < shared->size() ? (*shared)[i] : 0.0; };
  p.tail_ = [suffix](BasisIndex n) -> std::optional<double> {
    return n < suffix->size() ? (*suffix)[n] : 0.0;
  };
  p.description_ = "finite";
  for (double x : *shared) p.description_ += " " + format_double(x);
  return p;
}

TransitionKernel build_identity() {
  KernelMetadata md;
  md.column_mass_sup = 1.0;
  return TransitionKernel(
      [](BasisIndex i, std::size_t cutoff) {
        Row r;
        if (i < cutoff) {
          r.entries.push_back({i, 1.0});
        } else {
          r.tail_mass = 1.0;
        }
        return r;
      },
      std::move(md), "identity");
}

TransitionKernel build_renewal(const ProbabilitySequence& p) {
  const auto total = p.tail_from(1);
  if (!total || std::abs(*total - 1.0) > kSequenceTol) {
    throw Error(ErrorCode::NotMarkov, "renewal law must sum to 1 over i >= 1");
  }
  for (BasisIndex n = 1; n <= 64; ++n) {
    const double term = p(n);
    const auto here = p.tail_from(n);
    const auto after = p.tail_from(n + 1);
    if (!(term >= 0.0 && term <= 1.0) || !here || !after ||
        std::abs(*here - *after - term) > kSequenceTol) {
      throw Error(ErrorCode::NotMarkov,
                  "renewal law tail formula is inconsistent at index " + std::to_string(n));
    }
  }

  KernelMetadata md;
  // Column k >= 1 receives p_0k from state 0 and 1 from state k+1.
  md.column_mass_sup = 2.0;
  return TransitionKernel(
      [p](BasisIndex i, std::size_t cutoff) {
        Row r;
        if (i == 0) {
          for (BasisIndex k = 1; k < cutoff; ++k) {
            const double x = p(k);
            if (x > 0.0) r.entries.push_back({k, x});
          }
          r.tail_mass = *p.tail_from(std::max<BasisIndex>(cutoff, 1));
        } else if (i - 1 < cutoff) {
          r.entries.push_back({i - 1, 1.0});
        } else {
          r.tail_mass = 1.0;
        }
        return r;
      },
      std::move(md), "renewal " + p.description());
}

TransitionKernel build_house_of_cards(const ProbabilitySequence& p) {
  auto checked = [p](BasisIndex i) {
    const double x = p(i);
    if (!(x > 0.0 && x <= 1.0)) {
      throw Error(ErrorCode::InvalidParameter,
                  "house-of-cards p_" + std::to_string(i) + " = " + format_double(x) +
                      " is outside (0, 1]");
    }
    return x;
  };
  for (BasisIndex i = 0; i < 1024; ++i) checked(i);

  KernelMetadata md;
  // Column 0 collects sum_i p_i; column k >= 1 only 1 - p_{k-1}.
  if (const auto total = p.tail_from(0)) md.column_mass_sup = std::max(*total, 1.0);
  return TransitionKernel(
      [checked](BasisIndex i, std::size_t cutoff) {
        const double x = checked(i);
        Row r;
        r.entries.push_back({0, x});
        const double climb = 1.0 - x;
        if (climb > 0.0) {
          if (i + 1 < cutoff) {
            r.entries.push_back({i + 1, climb});
          } else {
            r.tail_mass = climb;
          }
        }
        return r;
      },
      std::move(md), "house-of-cards " + p.description());
}

TransitionKernel build_branching(std::vector<double> offspring, std::size_t max_population) {
  check_offspring(offspring);
  auto law = std::make_shared<const std::vector<double>>(offspring);
  auto memo = std::make_shared<std::vector<Convolution>>();
  memo->reserve(max_population + 1);
  memo->push_back({1.0});
  for (std::size_t i = 1; i <= max_population; ++i) memo->push_back(convolve(memo->back(), *law));
  std::shared_ptr<const std::vector<Convolution>> rows = std::move(memo);

  KernelMetadata md;
  md.column_mass_sup = branching_column_bound(offspring, 0.5);

  std::string description = "branching";
  for (double x : offspring) description += " " + format_double(x);
  return TransitionKernel(
      [law, rows](BasisIndex i, std::size_t cutoff) {
        if (i < rows->size()) return row_from_law((*rows)[i], cutoff);
        Convolution c = rows->back();
        for (std::size_t j = rows->size() - 1; j < i; ++j) c = convolve(c, *law);
        return row_from_law(c, cutoff);
      },
      std::move(md), std::move(description));
}

TransitionKernel build_from_triples(const std::map<BasisIndex, std::vector<Entry>>& rows) {
  std::size_t extent = 0;
  std::map<BasisIndex, CompensatedSum> columns;
  auto shared = std::make_shared<std::map<BasisIndex, std::vector<Entry>>>();
  for (const auto& [i, entries] : rows) {
    auto sorted = entries;
    std::sort(sorted.begin(), sorted.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (j > 0 && sorted[j].index == sorted[j - 1].index) {
        throw Error(ErrorCode::InvalidParameter, "duplicate transition " + std::to_string(i) +
                                                     " -> " + std::to_string(sorted[j].index));
      }
      extent = std::max<std::size_t>(extent, std::max(i, sorted[j].index) + 1);
      columns[sorted[j].index].add(std::abs(sorted[j].value));
    }
    extent = std::max<std::size_t>(extent, i + 1);
    (*shared)[i] = std::move(sorted);
  }
  double sup = 0.0;
  for (const auto& [k, sum] : columns) sup = std::max(sup, sum.value());

  KernelMetadata md;
  md.extent = extent;
  md.column_mass_sup = sup;
  md.kind = StructureKind::ExplicitSparse;
  std::shared_ptr<const std::map<BasisIndex, std::vector<Entry>>> table = std::move(shared);
  return TransitionKernel(
      [table](BasisIndex i, std::size_t cutoff) {
        Row r;
        auto it = table->find(i);
        if (it == table->end()) return r;
        CompensatedSum tail;
        for (const auto& e : it->second) {
          if (e.index < cutoff) {
            r.entries.push_back(e);
          } else {
            tail.add(e.value);
          }
        }
        r.tail_mass = tail.value();
        return r;
      },
      std::move(md), "explicit " + std::to_string(extent) + "-state kernel");
}

double branching_column_bound(std::span<const double> offspring, double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "evaluation point must lie in (0, 1)");
  }
  check_offspring(offspring);
  CompensatedSum phi;
  double power = 1.0;
  for (double p : offspring) {
    phi.add(p * power);
    power *= s;
  }
  const double f = phi.value();
  if (f >= 1.0) {
    throw Error(ErrorCode::InvalidParameter, "generating function reached 1 at s");
  }
  const double p0 = offspring[0];
  return std::max(p0 / (1.0 - p0), f / (s * (1.0 - f)));
}

}  // namespace hevo
