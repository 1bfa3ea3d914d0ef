#include <cmath>
#include <limits>

#include <doctest.h>

#include "hevo/element.hpp"
#include "hevo/error.hpp"

using namespace hevo;

TEST_CASE("from_entries sorts and rejects bad input") {
  auto v = Element::from_entries({{3, 1.0}, {1, 2.0}});
  REQUIRE(v.support_size() == 2);
  CHECK(v.entries()[0].index == 1);
  CHECK(v.coefficient(3) == 1.0);
  CHECK(v.coefficient(7) == 0.0);

  CHECK_THROWS_AS(Element::from_entries({{1, 1.0}, {1, 2.0}}), Error);
  try {
    Element::from_entries({{0, std::numeric_limits<double>::quiet_NaN()}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameter);
  }
  CHECK_THROWS_AS(Element::from_entries({}, -1.0), Error);
}

TEST_CASE("equality treats absent indices as zero") {
  auto a = Element::from_entries({{0, 1.0}, {2, 0.0}});
  auto b = Element::from_entries({{0, 1.0}});
  CHECK(a == b);
  CHECK_FALSE(a == b.with_tail_bound(1e-3));
  CHECK_FALSE(a == Element::basis(0, 2.0));
}

TEST_CASE("inner product and norm") {
  auto v = Element::from_entries({{0, 3.0}, {5, 4.0}});
  auto w = Element::from_entries({{5, 1.0}, {6, 9.0}});
  CHECK(inner_product(v, w).value == doctest::Approx(4.0));
  CHECK(inner_product(v, w).uncertainty == 0.0);
  CHECK(norm(v).value == doctest::Approx(5.0));

  auto vt = v.with_tail_bound(0.1);
  auto ip = inner_product(vt, w);
  CHECK(ip.uncertainty == doctest::Approx(0.1 * std::sqrt(82.0)));
  auto n = norm(vt);
  CHECK(n.value == doctest::Approx(5.0));
  CHECK(n.uncertainty == doctest::Approx(std::hypot(5.0, 0.1) - 5.0));
}

TEST_CASE("axpy combines coefficients and tails") {
  auto v = Element::from_entries({{0, 1.0}, {2, 1.0}}, 0.5);
  auto w = Element::from_entries({{2, -2.0}, {3, 1.0}}, 0.25);
  auto r = axpy(2.0, v, w);
  CHECK(r.coefficient(0) == 2.0);
  CHECK(r.coefficient(2) == 0.0);
  CHECK(r.coefficient(3) == 1.0);
  CHECK(r.tail_bound() == doctest::Approx(1.25));
  CHECK_THROWS_AS(axpy(std::numeric_limits<double>::infinity(), v, w), Error);
}

TEST_CASE("truncate moves dropped mass into the tail") {
  auto v = Element::from_entries({{0, 1.0}, {10, 3e-4}, {11, 4e-4}});
  TruncationPolicy p{10, 1e-9, 1e-3};
  auto t = truncate(v, p);
  CHECK(t.support_size() == 1);
  CHECK(t.tail_bound() == doctest::Approx(5e-4));

  p.max_tail = 1e-4;
  try {
    truncate(v, p);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TailTooLarge);
  }
}

TEST_CASE("policy validation") {
  TruncationPolicy p;
  p.validate();
  p.cutoff = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}
