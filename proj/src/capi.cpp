// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#include "hevo/hevo.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "hevo/error.hpp"
#include "hevo/evolution_operator.hpp"
#include "hevo/markov.hpp"
#include "hevo/text_format.hpp"

struct hevo_element {
  hevo::Element value;
};

struct hevo_kernel {
  hevo::TransitionKernel value;
};

struct hevo_distribution {
  hevo::Distribution value;
};

struct hevo_certificate {
  hevo::Certificate value;
};

struct hevo_simulation {
  hevo::SimulationResult value;
  std::vector<std::pair<hevo::BasisIndex, std::size_t>> flat;
};

namespace {

thread_local std::string last_error;

hevo_status to_status(hevo::ErrorCode code) {
  using hevo::ErrorCode;
  switch (code) {
    case ErrorCode::TailTooLarge: return HEVO_TAIL_TOO_LARGE;
    case ErrorCode::NonFiniteCoefficient: return HEVO_NON_FINITE_COEFFICIENT;
    case ErrorCode::UnsupportedInput: return HEVO_UNSUPPORTED_INPUT;
    case ErrorCode::InvalidWeights: return HEVO_INVALID_WEIGHTS;
    case ErrorCode::NotMarkov: return HEVO_NOT_MARKOV;
    case ErrorCode::InvalidParameter: return HEVO_INVALID_PARAMETER;
    case ErrorCode::MissingCertificate: return HEVO_MISSING_CERTIFICATE;
    case ErrorCode::Parse: return HEVO_PARSE_ERROR;
    case ErrorCode::Io: return HEVO_IO_ERROR;
  }
  return HEVO_INTERNAL_ERROR;
}

hevo_status fail(hevo_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
hevo_status guarded(F&& body) {
  try {
    body();
    return HEVO_OK;
  } catch (const hevo::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HEVO_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(HEVO_INTERNAL_ERROR, e.what());
  }
}

hevo::TruncationPolicy policy_of(const hevo_policy* p) {
  if (!p) return {};
  return {p->cutoff, p->abs_tol, p->max_tail};
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define HEVO_REQUIRE(cond)                                                      \
  do {                                                                          \
    if (!(cond)) return fail(HEVO_INVALID_ARGUMENT, "null argument: " #cond);   \
  } while (0)

}  // namespace

extern "C" {

const char* hevo_status_name(hevo_status status) {
  switch (status) {
    case HEVO_OK: return "OK";
    case HEVO_TAIL_TOO_LARGE: return "TailTooLarge";
    case HEVO_NON_FINITE_COEFFICIENT: return "NonFiniteCoefficient";
    case HEVO_UNSUPPORTED_INPUT: return "UnsupportedInput";
    case HEVO_INVALID_WEIGHTS: return "InvalidWeights";
    case HEVO_NOT_MARKOV: return "NotMarkov";
    case HEVO_INVALID_PARAMETER: return "InvalidParameter";
    case HEVO_MISSING_CERTIFICATE: return "MissingCertificate";
    case HEVO_PARSE_ERROR: return "ParseError";
    case HEVO_IO_ERROR: return "IoError";
    case HEVO_INVALID_ARGUMENT: return "InvalidArgument";
    case HEVO_INTERNAL_ERROR: return "InternalError";
  }
  return "Unknown";
}

const char* hevo_last_error(void) { return last_error.c_str(); }

hevo_policy hevo_default_policy(void) {
  const hevo::TruncationPolicy p;
  return {p.cutoff, p.abs_tol, p.max_tail};
}

void hevo_string_free(char* s) { std::free(s); }

size_t hevo_format_double(double x, char* buf, size_t size) {
  const std::string s = hevo::format_double(x);
  if (buf && size > 0) {
    const std::size_t n = std::min(size - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

hevo_status hevo_element_basis(uint64_t index, hevo_element** out) {
  HEVO_REQUIRE(out);
  return guarded([&] { *out = new hevo_element{hevo::Element::basis(index)}; });
}

hevo_status hevo_element_parse(const char* text, hevo_element** out) {
  HEVO_REQUIRE(text && out);
  return guarded([&] { *out = new hevo_element{hevo::parse_element(text)}; });
}

hevo_status hevo_element_load(const char* path, hevo_element** out) {
  HEVO_REQUIRE(path && out);
  return guarded([&] { *out = new hevo_element{hevo::parse_element(hevo::read_file(path))}; });
}

void hevo_element_free(hevo_element* e) { delete e; }

size_t hevo_element_size(const hevo_element* e) { return e ? e->value.support_size() : 0; }

hevo_status hevo_element_entry(const hevo_element* e, size_t pos, uint64_t* index,
                               double* value) {
  HEVO_REQUIRE(e && index && value);
  if (pos >= e->value.support_size()) return fail(HEVO_INVALID_ARGUMENT, "position out of range");
  *index = e->value.entries()[pos].index;
  *value = e->value.entries()[pos].value;
  return HEVO_OK;
}

double hevo_element_tail(const hevo_element* e) { return e ? e->value.tail_bound() : 0.0; }

double hevo_element_norm(const hevo_element* e) { return e ? hevo::norm(e->value).value : 0.0; }

hevo_status hevo_element_format(const hevo_element* e, char** out) {
  HEVO_REQUIRE(e && out);
  return guarded([&] { *out = copy_string(hevo::format_element(e->value)); });
}

hevo_status hevo_kernel_parse(const char* text, hevo_kernel** out) {
  HEVO_REQUIRE(text && out);
  return guarded([&] { *out = new hevo_kernel{hevo::parse_kernel(text)}; });
}

hevo_status hevo_kernel_load(const char* path, hevo_kernel** out) {
  HEVO_REQUIRE(path && out);
  return guarded([&] { *out = new hevo_kernel{hevo::parse_kernel(hevo::read_file(path))}; });
}

void hevo_kernel_free(hevo_kernel* k) { delete k; }

const char* hevo_kernel_description(const hevo_kernel* k) {
  return k ? k->value.description().c_str() : "";
}

hevo_status hevo_kernel_validate(const hevo_kernel* k, size_t states, const hevo_policy* policy,
                                 size_t* violations, char** report) {
  HEVO_REQUIRE(k && violations);
  return guarded([&] {
    auto r = hevo::validate_kernel(k->value, states, policy_of(policy));
    *violations = r.violations.size();
    if (report) {
      std::string text = "checked " + std::to_string(r.states_checked) + " states: " +
                         std::to_string(r.violations.size()) + " violation(s)\n";
      for (const auto& v : r.violations) {
        text += "state " + std::to_string(v.state) + ": " + v.message + "\n";
      }
      *report = copy_string(text);
    }
  });
}

hevo_status hevo_square(const hevo_kernel* k, uint64_t i, const hevo_policy* policy,
                        hevo_element** out) {
  HEVO_REQUIRE(k && out);
  return guarded([&] {
    const auto p = policy_of(policy);
    auto s = hevo::to_structure_map(k->value, p);
    *out = new hevo_element{hevo::square_basis(s, i, p)};
  });
}

hevo_status hevo_product(const hevo_kernel* k, const hevo_element* v, const hevo_element* w,
                         const hevo_policy* policy, hevo_element** out) {
  HEVO_REQUIRE(k && v && w && out);
  return guarded([&] {
    const auto p = policy_of(policy);
    auto s = hevo::to_structure_map(k->value, p);
    *out = new hevo_element{hevo::product(s, v->value, w->value, p)};
  });
}

hevo_status hevo_evolution_apply(const hevo_kernel* k, const hevo_element* v,
                                 const hevo_policy* policy, hevo_element** out) {
  HEVO_REQUIRE(k && v && out);
  return guarded([&] {
    const auto p = policy_of(policy);
    auto s = hevo::to_structure_map(k->value, p);
    if (!v->value.exact()) {
      auto cert = hevo::certify_rowsum(s, p);
      if (cert.norm_bound) s = s.with_norm_bound(*cert.norm_bound);
    }
    *out = new hevo_element{hevo::evolution_apply(s, v->value, p)};
  });
}

hevo_status hevo_continuity_bound(const hevo_kernel* k, const hevo_element* v,
                                  const hevo_policy* policy, double* m_v, int* exact) {
  HEVO_REQUIRE(k && v && m_v);
  return guarded([&] {
    const auto p = policy_of(policy);
    auto b = hevo::continuity_bound(hevo::to_structure_map(k->value, p), v->value, p);
    *m_v = b.m_v;
    if (exact) *exact = b.exact ? 1 : 0;
  });
}

hevo_status hevo_certify(const hevo_kernel* k, hevo_method method, const hevo_element* alpha,
                         const hevo_element* beta, const hevo_policy* policy,
                         hevo_certificate** out) {
  HEVO_REQUIRE(k && out);
  return guarded([&] {
    const auto p = policy_of(policy);
    auto s = hevo::to_structure_map(k->value, p);
    switch (method) {
      case HEVO_METHOD_SCHUR: {
        auto a = alpha ? hevo::Weights::from_element(alpha->value) : hevo::Weights::unit();
        auto b = beta ? hevo::Weights::from_element(beta->value) : hevo::Weights::unit();
        *out = new hevo_certificate{hevo::certify_schur(s, a, b, p)};
        return;
      }
      case HEVO_METHOD_HILBERT_SCHMIDT:
        *out = new hevo_certificate{hevo::certify_hilbert_schmidt(s, p)};
        return;
      case HEVO_METHOD_ROWSUM:
        *out = new hevo_certificate{hevo::certify_rowsum(s, p)};
        return;
    }
    throw hevo::Error(hevo::ErrorCode::InvalidParameter, "unknown certificate method");
  });
}

void hevo_certificate_free(hevo_certificate* c) { delete c; }

int hevo_certificate_certified(const hevo_certificate* c) {
  return c && c->value.certified() ? 1 : 0;
}

hevo_status hevo_certificate_norm_bound(const hevo_certificate* c, double* out) {
  HEVO_REQUIRE(c && out);
  if (!c->value.norm_bound) return fail(HEVO_INVALID_ARGUMENT, "certificate is inconclusive");
  *out = *c->value.norm_bound;
  return HEVO_OK;
}

void hevo_certificate_constants(const hevo_certificate* c, double* m1, double* m2) {
  double a = 0.0;
  double b = 0.0;
  if (c) {
    const auto& v = c->value.verdict;
    if (const auto* hs = std::get_if<hevo::HilbertSchmidt>(&v)) a = hs->hs_sum;
    if (const auto* sc = std::get_if<hevo::Schur>(&v)) {
      a = sc->m1;
      b = sc->m2;
    }
    if (const auto* rs = std::get_if<hevo::RowSum>(&v)) a = rs->m;
    if (const auto* none = std::get_if<hevo::Inconclusive>(&v)) a = none->partial_sum;
  }
  if (m1) *m1 = a;
  if (m2) *m2 = b;
}

double hevo_certificate_measured_sup(const hevo_certificate* c) {
  return c ? c->value.measured_sup : 0.0;
}

hevo_status hevo_certificate_render(const hevo_certificate* c, char** out) {
  HEVO_REQUIRE(c && out);
  return guarded([&] { *out = copy_string(hevo::render(c->value)); });
}

hevo_status hevo_distribution_point(uint64_t state, hevo_distribution** out) {
  HEVO_REQUIRE(out);
  return guarded([&] { *out = new hevo_distribution{hevo::Distribution::point_mass(state)}; });
}

hevo_status hevo_distribution_parse(const char* text, double tol, hevo_distribution** out) {
  HEVO_REQUIRE(text && out);
  return guarded([&] { *out = new hevo_distribution{hevo::parse_distribution(text, tol)}; });
}

hevo_status hevo_distribution_load(const char* path, double tol, hevo_distribution** out) {
  HEVO_REQUIRE(path && out);
  return guarded([&] {
    *out = new hevo_distribution{hevo::parse_distribution(hevo::read_file(path), tol)};
  });
}

void hevo_distribution_free(hevo_distribution* d) { delete d; }

size_t hevo_distribution_size(const hevo_distribution* d) {
  return d ? d->value.underlying().support_size() : 0;
}

hevo_status hevo_distribution_entry(const hevo_distribution* d, size_t pos, uint64_t* state,
                                    double* probability) {
  HEVO_REQUIRE(d && state && probability);
  const auto entries = d->value.underlying().entries();
  if (pos >= entries.size()) return fail(HEVO_INVALID_ARGUMENT, "position out of range");
  *state = entries[pos].index;
  *probability = entries[pos].value;
  return HEVO_OK;
}

double hevo_distribution_probability(const hevo_distribution* d, uint64_t state) {
  return d ? d->value.probability(state) : 0.0;
}

double hevo_distribution_deficit(const hevo_distribution* d) {
  return d ? d->value.mass_deficit() : 0.0;
}

hevo_status hevo_distribution_format_tsv(const hevo_distribution* d, char** out) {
  HEVO_REQUIRE(d && out);
  return guarded([&] { *out = copy_string(hevo::format_distribution_tsv(d->value)); });
}

hevo_status hevo_evolve(const hevo_kernel* k, const hevo_distribution* init, size_t steps,
                        const hevo_policy* policy, hevo_distribution** out) {
  HEVO_REQUIRE(k && init && out);
  return guarded([&] {
    *out = new hevo_distribution{
        hevo::evolve_distribution(k->value, init->value, steps, policy_of(policy))};
  });
}

hevo_status hevo_nstep(const hevo_kernel* k, uint64_t from, size_t steps,
                       const hevo_policy* policy, hevo_distribution** out) {
  HEVO_REQUIRE(k && out);
  return guarded([&] {
    const auto p = policy_of(policy);
    auto table = hevo::nstep_oracle(k->value, from, steps, p);
    *out = new hevo_distribution{hevo::Distribution(
        hevo::Element::from_entries(std::move(table.probabilities)), table.deficit, p.abs_tol)};
  });
}

hevo_status hevo_simulate(const hevo_kernel* k, const hevo_distribution* init, size_t steps,
                          size_t paths, uint64_t seed, const hevo_policy* policy,
                          hevo_simulation** out) {
  HEVO_REQUIRE(k && init && out);
  return guarded([&] {
    auto result = hevo::simulate(k->value, init->value, steps, paths, seed, policy_of(policy));
    std::vector<std::pair<hevo::BasisIndex, std::size_t>> flat(result.counts.begin(),
                                                                result.counts.end());
    *out = new hevo_simulation{std::move(result), std::move(flat)};
  });
}

void hevo_simulation_free(hevo_simulation* s) { delete s; }

size_t hevo_simulation_paths(const hevo_simulation* s) { return s ? s->value.paths : 0; }

size_t hevo_simulation_escaped(const hevo_simulation* s) { return s ? s->value.escaped : 0; }

size_t hevo_simulation_size(const hevo_simulation* s) { return s ? s->flat.size() : 0; }

hevo_status hevo_simulation_entry(const hevo_simulation* s, size_t pos, uint64_t* state,
                                  size_t* count) {
  HEVO_REQUIRE(s && state && count);
  if (pos >= s->flat.size()) return fail(HEVO_INVALID_ARGUMENT, "position out of range");
  *state = s->flat[pos].first;
  *count = s->flat[pos].second;
  return HEVO_OK;
}

}  // extern "C"
