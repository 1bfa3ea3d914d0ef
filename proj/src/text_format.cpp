// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#include "hevo/text_format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "hevo/error.hpp"

namespace hevo {
namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

// Non-empty lines; `#` lines are returned only when keep_comments is set.
std::vector<Line> lines_of(std::string_view text, bool keep_comments) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    const auto line = trim(text.substr(pos, end - pos));
    if (!line.empty() && (keep_comments || line.front() != '#')) {
      out.push_back({number, split(line)});
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view token, std::size_t line) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(x)) {
    fail(line, "expected a finite number, got '" + std::string(token) + "'");
  }
  return x;
}

BasisIndex parse_index(std::string_view token, std::size_t line) {
  BasisIndex i = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), i);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(line, "expected a nonnegative integer index, got '" + std::string(token) + "'");
  }
  return i;
}

struct ParsedElement {
  std::vector<Entry> entries;
  double tail = 0.0;
  std::optional<double> deficit;
};

ParsedElement parse_entries(std::string_view text) {
  ParsedElement out;
  std::map<BasisIndex, std::size_t> seen;
  bool tail_seen = false;
  for (const auto& line : lines_of(text, true)) {
    const auto& t = line.tokens;
    if (t.front().front() == '#') {
      if (t.front() == "#deficit") {
        if (t.size() != 2) fail(line.number, "expected '#deficit <x>'");
        if (out.deficit) fail(line.number, "repeated deficit line");
        out.deficit = parse_real(t[1], line.number);
      }
      continue;
    }
    if (tail_seen) fail(line.number, "'tail' must be the last line");
    if (t.front() == "tail") {
      if (t.size() != 2) fail(line.number, "expected 'tail <bound>'");
      out.tail = parse_real(t[1], line.number);
      if (out.tail < 0.0) fail(line.number, "tail bound must be nonnegative");
      tail_seen = true;
      continue;
    }
    if (t.size() != 2) fail(line.number, "expected 'index value'");
    const BasisIndex i = parse_index(t[0], line.number);
    const double value = parse_real(t[1], line.number);
    if (auto [it, inserted] = seen.emplace(i, line.number); !inserted) {
      fail(line.number, "duplicate index " + std::to_string(i) + " (first on line " +
                            std::to_string(it->second) + ")");
    }
    out.entries.push_back({i, value});
  }
  return out;
}

std::vector<double> parse_reals(const std::vector<std::string_view>& tokens, std::size_t from,
                                std::size_t line) {
  std::vector<double> out;
  for (std::size_t j = from; j < tokens.size(); ++j) out.push_back(parse_real(tokens[j], line));
  return out;
}

TransitionKernel parse_builtin(const Line& line) {
  const auto& t = line.tokens;
  auto arity = [&](std::size_t n) {
    if (t.size() != n) fail(line.number, "wrong number of arguments for builtin " +
                                             std::string(t.size() > 1 ? t[1] : ""));
  };
  if (t.size() < 2) fail(line.number, "builtin needs a family name");
  const auto family = t[1];
  if (family == "identity") {
    arity(2);
    return build_identity();
  }
  if (family == "renewal") {
    arity(4);
    if (t[2] != "geometric") fail(line.number, "renewal supports only 'geometric <q>'");
    return build_renewal(ProbabilitySequence::geometric(parse_real(t[3], line.number), 1));
  }
  if (family == "house-of-cards") {
    arity(4);
    const double x = parse_real(t[3], line.number);
    if (t[2] == "constant") return build_house_of_cards(ProbabilitySequence::constant(x));
    if (t[2] == "geometric") return build_house_of_cards(ProbabilitySequence::geometric(x, 0));
    fail(line.number, "house-of-cards supports 'constant <p>' or 'geometric <q>'");
  }
  if (family == "branching") {
    if (t.size() < 4) fail(line.number, "branching needs at least p0 and p1");
    return build_branching(parse_reals(t, 2, line.number));
  }
  fail(line.number, "unknown builtin family '" + std::string(family) + "'");
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  std::string s(buf, ec == std::errc{} ? ptr : buf);
  if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

Element parse_element(std::string_view text) {
  auto parsed = parse_entries(text);
  return Element::from_entries(std::move(parsed.entries), parsed.tail);
}

std::string format_element(const Element& v) {
  std::string out;
  for (const auto& e : v.entries()) {
    out += std::to_string(e.index) + " " + format_double(e.value) + "\n";
  }
  if (v.tail_bound() > 0.0) out += "tail " + format_double(v.tail_bound()) + "\n";
  return out;
}

Distribution parse_distribution(std::string_view text, double tol) {
  auto parsed = parse_entries(text);
  for (const auto& e : parsed.entries) {
    if (e.value < 0.0) {
      throw Error(ErrorCode::Parse,
                  "negative probability at state " + std::to_string(e.index));
    }
  }
  return Distribution(Element::from_entries(std::move(parsed.entries)),
                      parsed.deficit.value_or(0.0), tol);
}

std::string format_distribution_tsv(const Distribution& d) {
  std::string out;
  for (const auto& e : d.underlying().entries()) {
    out += std::to_string(e.index) + "\t" + format_double(e.value) + "\n";
  }
  out += "#deficit " + format_double(d.mass_deficit()) + "\n";
  return out;
}

TransitionKernel parse_kernel(std::string_view text) {
  const auto lines = lines_of(text, false);
  if (lines.empty() || lines.front().tokens.size() != 2 || lines.front().tokens[0] != "kernel" ||
      lines.front().tokens[1] != "v1") {
    throw Error(ErrorCode::Parse, "kernel file must start with 'kernel v1'");
  }
  if (lines.size() < 2) throw Error(ErrorCode::Parse, "kernel file has no body");

  const Line& body = lines[1];
  if (body.tokens.front() == "builtin") {
    if (lines.size() > 2) fail(lines[2].number, "unexpected content after builtin line");
    return parse_builtin(body);
  }

  std::map<BasisIndex, std::vector<Entry>> rows;
  std::map<std::pair<BasisIndex, BasisIndex>, std::size_t> seen;
  bool ended = false;
  for (std::size_t j = 1; j < lines.size(); ++j) {
    const auto& line = lines[j];
    const auto& t = line.tokens;
    if (ended) fail(line.number, "unexpected content after 'end'");
    if (t.size() == 1 && t[0] == "end") {
      ended = true;
      continue;
    }
    if (t.size() != 4 || t[0] != "row") fail(line.number, "expected 'row <i> <k> <p>' or 'end'");
    const BasisIndex i = parse_index(t[1], line.number);
    const BasisIndex k = parse_index(t[2], line.number);
    const double p = parse_real(t[3], line.number);
    if (auto [it, inserted] = seen.emplace(std::pair{i, k}, line.number); !inserted) {
      fail(line.number, "duplicate transition " + std::to_string(i) + " -> " + std::to_string(k));
    }
    rows[i].push_back({k, p});
  }
  if (!ended) throw Error(ErrorCode::Parse, "sparse kernel is missing its 'end' line");
  return build_from_triples(rows);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hevo
