// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "hevo/element.hpp"
#include "hevo/markov.hpp"

namespace hevo {

/// Shortest decimal text that reads back to the same double; integral values
/// keep a trailing ".0".
std::string format_double(double x);

/// `index value` per line, `#` comments, optional final `tail <bound>`.
/// Throws Parse on malformed lines or duplicate indices.
Element parse_element(std::string_view text);
std::string format_element(const Element& v);

/// Element format plus an optional `#deficit <x>` trailer, checked against
/// the Distribution invariants (InvalidParameter when they fail).
Distribution parse_distribution(std::string_view text, double tol = 1e-9);
/// `state<TAB>probability` sorted by state, then `#deficit <x>`.
std::string format_distribution_tsv(const Distribution& d);

/// `kernel v1` header followed by one `builtin ...` line or `row i k p`
/// triples terminated by `end`.
TransitionKernel parse_kernel(std::string_view text);

std::string read_file(const std::string& path);

}  // namespace hevo
