#include <doctest.h>

#include "hevo/error.hpp"
#include "hevo/evolution_operator.hpp"
#include "hevo/text_format.hpp"

using namespace hevo;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected throw");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("format_double") {
  CHECK(format_double(1.0) == "1.0");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(256.0) == "256.0");
  CHECK(format_double(1e-20) == "1e-20");
  CHECK(format_double(1.4142135623730951) == "1.4142135623730951");
}

TEST_CASE("element text round-trips") {
  auto v = Element::from_entries({{0, 0.1}, {7, -2.5}}, 1e-9);
  auto text = format_element(v);
  CHECK(text == "0 0.1\n7 -2.5\ntail 1e-09\n");
  CHECK(parse_element(text) == v);
  CHECK(parse_element("# comment\n3 1\n\n1 2\n") == Element::from_entries({{1, 2.0}, {3, 1.0}}));
  CHECK(code_of([] { parse_element("1 2\n1 3\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_element("x 2\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_element("1\n"); }) == ErrorCode::Parse);
}

TEST_CASE("distribution tsv round-trips") {
  auto d = Distribution(Element::from_entries({{0, 0.5}, {2, 0.375}}), 0.125);
  auto text = format_distribution_tsv(d);
  CHECK(text == "0\t0.5\n2\t0.375\n#deficit 0.125\n");
  CHECK(parse_distribution(text) == d);
  CHECK(code_of([] { parse_distribution("0 0.5\n"); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { parse_distribution("0 -0.5\n1 1.5\n"); }) == ErrorCode::Parse);
}

TEST_CASE("kernel files") {
  auto k = parse_kernel("kernel v1\n# two states\nrow 0 1 1\nrow 1 0 0.5\nrow 1 1 0.5\nend\n");
  CHECK(k.row(1, 4).entries.size() == 2);
  CHECK(validate_kernel(k, 2, {}).ok());

  auto r = parse_kernel("kernel v1\nbuiltin renewal geometric 0.5\n");
  auto c = certify_rowsum(to_structure_map(r, {16, 1e-12, 1e-6}), {16, 1e-12, 1e-6});
  CHECK(std::get<RowSum>(c.verdict).m == 2.0);

  CHECK(parse_kernel("kernel v1\nbuiltin branching 0.5 0.5\n").row(1, 8).entries.size() == 2);
  CHECK(parse_kernel("kernel v1\nbuiltin identity\n").row(4, 8).entries[0].index == 4);
  CHECK(parse_kernel("kernel v1\nbuiltin house-of-cards constant 0.5\n").row(0, 8).entries.size() ==
        2);

  CHECK(code_of([] { parse_kernel("row 0 0 1\nend\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_kernel("kernel v1\nrow 0 0 1\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_kernel("kernel v1\nbuiltin nope\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_kernel("kernel v1\nrow 0 0 1\nrow 0 0 1\nend\n"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { read_file("/nonexistent/file"); }) == ErrorCode::Io);
}
