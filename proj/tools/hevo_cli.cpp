// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hevo/hevo.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitTail = 3;
constexpr int kExitParse = 4;

struct Failure {
  hevo_status status;
  std::string message;
};

int exit_code(hevo_status s) {
  switch (s) {
    case HEVO_OK: return kExitOk;
    case HEVO_TAIL_TOO_LARGE:
    case HEVO_MISSING_CERTIFICATE: return kExitTail;
    case HEVO_PARSE_ERROR:
    case HEVO_IO_ERROR: return kExitParse;
    case HEVO_NOT_MARKOV:
    case HEVO_INVALID_PARAMETER:
    case HEVO_INVALID_WEIGHTS:
    case HEVO_UNSUPPORTED_INPUT:
    case HEVO_NON_FINITE_COEFFICIENT: return kExitValidation;
    default: return kExitOther;
  }
}

void check(hevo_status s) {
  if (s != HEVO_OK) throw Failure{s, hevo_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ElementPtr = std::unique_ptr<hevo_element, Deleter<hevo_element, hevo_element_free>>;
using KernelPtr = std::unique_ptr<hevo_kernel, Deleter<hevo_kernel, hevo_kernel_free>>;
using DistPtr =
    std::unique_ptr<hevo_distribution, Deleter<hevo_distribution, hevo_distribution_free>>;
using CertPtr =
    std::unique_ptr<hevo_certificate, Deleter<hevo_certificate, hevo_certificate_free>>;
using SimPtr = std::unique_ptr<hevo_simulation, Deleter<hevo_simulation, hevo_simulation_free>>;

std::string take_string(char* s) {
  std::string out(s ? s : "");
  hevo_string_free(s);
  return out;
}

std::string num(double x) {
  char buf[32];
  hevo_format_double(x, buf, sizeof buf);
  return buf;
}

struct Config {
  std::vector<std::string> kernel;
  std::size_t cutoff = 256;
  double tol = 1e-9;
  double max_tail = 1e-6;
  std::string method = "schur";
  std::string alpha;
  std::string beta;
  std::string init;
  std::size_t steps = 1;
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  std::string output = "human";
  std::vector<std::string> operands;

  hevo_policy policy() const { return {cutoff, tol, max_tail}; }
};

KernelPtr load_kernel(const Config& c) {
  if (c.kernel.empty()) throw Failure{HEVO_INVALID_PARAMETER, "--kernel is required"};
  hevo_kernel* k = nullptr;
  if (c.kernel.front() == "builtin") {
    std::string text = "kernel v1\n";
    for (std::size_t i = 0; i < c.kernel.size(); ++i) text += (i ? " " : "") + c.kernel[i];
    check(hevo_kernel_parse((text + "\n").c_str(), &k));
  } else if (c.kernel.size() == 1) {
    check(hevo_kernel_load(c.kernel.front().c_str(), &k));
  } else {
    throw Failure{HEVO_PARSE_ERROR, "--kernel takes a path or `builtin ...`"};
  }
  return KernelPtr(k);
}

// Returns the state of a `basis:<i>` source, or -1 when source is a path.
long long basis_index(const std::string& source) {
  if (source.rfind("basis:", 0) != 0) return -1;
  const std::string digits = source.substr(6);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
    throw Failure{HEVO_PARSE_ERROR, "malformed basis source: " + source};
  }
  return std::stoll(digits);
}

DistPtr load_init(const Config& c) {
  if (c.init.empty()) throw Failure{HEVO_INVALID_PARAMETER, "--init is required"};
  hevo_distribution* d = nullptr;
  const long long i = basis_index(c.init);
  if (i >= 0) {
    check(hevo_distribution_point(static_cast<std::uint64_t>(i), &d));
  } else {
    check(hevo_distribution_load(c.init.c_str(), c.tol, &d));
  }
  return DistPtr(d);
}

ElementPtr load_element(const std::string& source) {
  hevo_element* e = nullptr;
  const long long i = basis_index(source);
  if (i >= 0) {
    check(hevo_element_basis(static_cast<std::uint64_t>(i), &e));
  } else {
    check(hevo_element_load(source.c_str(), &e));
  }
  return ElementPtr(e);
}

void print_element(const Config& c, const hevo_element* e) {
  if (c.output == "tsv") {
    char* text = nullptr;
    check(hevo_element_format(e, &text));
    std::cout << take_string(text);
    return;
  }
  const std::size_t n = hevo_element_size(e);
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::uint64_t i = 0;
    double v = 0.0;
    check(hevo_element_entry(e, pos, &i, &v));
    std::cout << "e_" << i << "  " << num(v) << "\n";
  }
  std::cout << "support " << n << "  norm " << num(hevo_element_norm(e)) << "  tail "
            << num(hevo_element_tail(e)) << "\n";
}

void print_distribution(const Config& c, const hevo_distribution* d) {
  if (c.output == "tsv") {
    char* text = nullptr;
    check(hevo_distribution_format_tsv(d, &text));
    std::cout << take_string(text);
    return;
  }
  const std::size_t n = hevo_distribution_size(d);
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::uint64_t state = 0;
    double p = 0.0;
    check(hevo_distribution_entry(d, pos, &state, &p));
    std::cout << "state " << state << "  " << num(p) << "\n";
  }
  std::cout << "deficit " << num(hevo_distribution_deficit(d)) << "\n";
}

int run_validate(const Config& c) {
  auto k = load_kernel(c);
  const auto policy = c.policy();
  std::size_t violations = 0;
  char* report = nullptr;
  check(hevo_kernel_validate(k.get(), c.cutoff, &policy, &violations, &report));
  std::cout << hevo_kernel_description(k.get()) << "\n" << take_string(report);
  return violations == 0 ? kExitOk : kExitValidation;
}

int run_certify(const Config& c) {
  auto k = load_kernel(c);
  const auto policy = c.policy();
  hevo_method method = HEVO_METHOD_SCHUR;
  if (c.method == "hs") method = HEVO_METHOD_HILBERT_SCHMIDT;
  if (c.method == "rowsum") method = HEVO_METHOD_ROWSUM;
  ElementPtr alpha;
  ElementPtr beta;
  if (!c.alpha.empty()) alpha = load_element(c.alpha);
  if (!c.beta.empty()) beta = load_element(c.beta);
  hevo_certificate* cert = nullptr;
  check(hevo_certify(k.get(), method, alpha.get(), beta.get(), &policy, &cert));
  CertPtr owned(cert);
  char* line = nullptr;
  check(hevo_certificate_render(cert, &line));
  std::cout << take_string(line) << "\n";
  return kExitOk;
}

int run_evolve(const Config& c) {
  auto k = load_kernel(c);
  auto init = load_init(c);
  const auto policy = c.policy();
  hevo_distribution* out = nullptr;
  check(hevo_evolve(k.get(), init.get(), c.steps, &policy, &out));
  DistPtr owned(out);
  print_distribution(c, out);
  return kExitOk;
}

int run_nstep(const Config& c) {
  auto k = load_kernel(c);
  const long long from = basis_index(c.init);
  if (from < 0) throw Failure{HEVO_INVALID_PARAMETER, "nstep needs --init basis:<i>"};
  const auto policy = c.policy();
  hevo_distribution* out = nullptr;
  check(hevo_nstep(k.get(), static_cast<std::uint64_t>(from), c.steps, &policy, &out));
  DistPtr owned(out);
  print_distribution(c, out);
  return kExitOk;
}

SimPtr simulate(const Config& c, const hevo_kernel* k, const hevo_distribution* init) {
  if (c.paths < 1) throw Failure{HEVO_INVALID_PARAMETER, "--paths must be at least 1"};
  const auto policy = c.policy();
  hevo_simulation* sim = nullptr;
  check(hevo_simulate(k, init, c.steps, c.paths, c.seed, &policy, &sim));
  return SimPtr(sim);
}

std::map<std::uint64_t, std::size_t> counts_of(const hevo_simulation* sim) {
  std::map<std::uint64_t, std::size_t> counts;
  for (std::size_t pos = 0; pos < hevo_simulation_size(sim); ++pos) {
    std::uint64_t state = 0;
    std::size_t n = 0;
    check(hevo_simulation_entry(sim, pos, &state, &n));
    counts[state] = n;
  }
  return counts;
}

int run_simulate(const Config& c) {
  auto k = load_kernel(c);
  auto init = load_init(c);
  auto sim = simulate(c, k.get(), init.get());
  const double paths = static_cast<double>(hevo_simulation_paths(sim.get()));
  const char* sep = c.output == "tsv" ? "\t" : "  ";
  for (const auto& [state, n] : counts_of(sim.get())) {
    std::cout << state << sep << n << sep << num(static_cast<double>(n) / paths) << "\n";
  }
  std::cout << (c.output == "tsv" ? "#escaped " : "escaped ") << hevo_simulation_escaped(sim.get())
            << "\n";
  return kExitOk;
}

// A state is flagged when |evolved - frequency| exceeds four binomial
// standard errors plus the evolved deficit. Flags are informational: with
// many rare states a few are expected.
int run_compare(const Config& c) {
  auto k = load_kernel(c);
  auto init = load_init(c);
  const auto policy = c.policy();
  hevo_distribution* evolved = nullptr;
  check(hevo_evolve(k.get(), init.get(), c.steps, &policy, &evolved));
  DistPtr owned(evolved);
  auto sim = simulate(c, k.get(), init.get());
  const auto counts = counts_of(sim.get());
  const double paths = static_cast<double>(hevo_simulation_paths(sim.get()));
  const double deficit = hevo_distribution_deficit(evolved);

  std::map<std::uint64_t, double> states;
  for (std::size_t pos = 0; pos < hevo_distribution_size(evolved); ++pos) {
    std::uint64_t s = 0;
    double p = 0.0;
    check(hevo_distribution_entry(evolved, pos, &s, &p));
    states[s] = p;
  }
  for (const auto& [s, n] : counts) states.emplace(s, 0.0);

  const bool tsv = c.output == "tsv";
  const char* sep = tsv ? "\t" : "  ";
  std::cout << (tsv ? "#" : "") << "state" << sep << "evolved" << sep << "frequency" << sep
            << "delta" << sep << "tolerance\n";
  std::size_t outside = 0;
  for (const auto& [s, q] : states) {
    const auto it = counts.find(s);
    const double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / paths;
    const double tolerance = 4.0 * std::sqrt(q * (1.0 - q) / paths) + deficit;
    const double delta = freq - q;
    if (std::abs(delta) > tolerance) ++outside;
    std::cout << s << sep << num(q) << sep << num(freq) << sep << num(delta) << sep
              << num(tolerance) << "\n";
  }
  std::cout << (tsv ? "#" : "") << "outside_tolerance " << outside << "\n";
  return kExitOk;
}

int run_product(const Config& c) {
  if (c.operands.size() != 2) throw Failure{HEVO_INVALID_PARAMETER, "product takes two operands"};
  auto k = load_kernel(c);
  auto v = load_element(c.operands[0]);
  auto w = load_element(c.operands[1]);
  const auto policy = c.policy();
  hevo_element* out = nullptr;
  check(hevo_product(k.get(), v.get(), w.get(), &policy, &out));
  ElementPtr owned(out);
  print_element(c, out);
  return kExitOk;
}

int run_square(const Config& c) {
  auto k = load_kernel(c);
  const long long i = basis_index(c.init);
  if (i < 0) throw Failure{HEVO_INVALID_PARAMETER, "square needs --init basis:<i>"};
  const auto policy = c.policy();
  hevo_element* out = nullptr;
  check(hevo_square(k.get(), static_cast<std::uint64_t>(i), &policy, &out));
  ElementPtr owned(out);
  print_element(c, out);
  return kExitOk;
}

void add_common(CLI::App* cmd, Config& c) {
  cmd->add_option("--kernel", c.kernel, "kernel file, or `builtin <family> <args...>`")
      ->expected(1, -1)
      ->required();
  cmd->add_option("--cutoff", c.cutoff, "truncation cutoff N")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", c.tol, "absolute tolerance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-tail", c.max_tail, "largest acceptable truncation tail")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--output", c.output, "output format")
      ->check(CLI::IsMember({"human", "tsv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolution operators of countable-state Markov chains"};
  app.require_subcommand(1);
  Config c;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Config&);
  };
  const Command commands[] = {
      {"validate", "check the rows of a kernel below the cutoff", run_validate},
      {"certify", "boundedness certificate for the evolution operator", run_certify},
      {"evolve", "C^n applied to an initial law", run_evolve},
      {"nstep", "n-step law by direct push-forward", run_nstep},
      {"simulate", "Monte Carlo state counts after n steps", run_simulate},
      {"compare", "evolve against simulate with binomial tolerances", run_compare},
      {"product", "product of two elements", run_product},
      {"square", "square of a basis vector", run_square},
  };
  std::map<const CLI::App*, int (*)(const Config&)> dispatch;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, c);
    dispatch[sub] = cmd.run;
    const std::string name = cmd.name;
    if (name == "certify") {
      sub->add_option("--method", c.method, "certificate")
          ->check(CLI::IsMember({"schur", "hs", "rowsum"}));
      sub->add_option("--alpha", c.alpha, "Schur weight file (element format)");
      sub->add_option("--beta", c.beta, "Schur weight file (element format)");
    }
    if (name == "evolve" || name == "nstep" || name == "simulate" || name == "compare" ||
        name == "square") {
      sub->add_option("--init", c.init, "initial law: file or basis:<i>")->required();
    }
    if (name == "evolve" || name == "nstep" || name == "simulate" || name == "compare") {
      sub->add_option("--steps", c.steps, "number of steps");
    }
    if (name == "simulate" || name == "compare") {
      sub->add_option("--paths", c.paths, "number of sample paths")->check(CLI::PositiveNumber);
      sub->add_option("--seed", c.seed, "generator seed");
    }
    if (name == "product") {
      sub->add_option("operands", c.operands, "two element files or basis:<i>")->expected(2);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    for (const auto* sub : app.get_subcommands()) return dispatch.at(sub)(c);
  } catch (const Failure& f) {
    std::cerr << "error: " << hevo_status_name(f.status) << ": " << f.message << "\n";
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
