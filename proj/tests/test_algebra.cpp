#include <cmath>
#include <random>

#include <doctest.h>

#include "dense_oracle.hpp"
#include "hevo/algebra.hpp"
#include "hevo/error.hpp"
#include "support.hpp"

using namespace hevo;
using namespace hevo::testing;

namespace {

Mat random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat c(n, Vec(n, 0.0));
  for (auto& row : c) {
    for (auto& x : row) x = u(rng) < -0.3 ? 0.0 : u(rng);
  }
  return c;
}

// Unit-bounded lazy map: column i is {i+1: 1/2} plus a geometric column
// spread 2^-(k+2) over all k. Column mass 1, tail mass computable.
StructureMap geometric_lazy() {
  StructureMetadata md;
  md.column_l1 = [](BasisIndex) { return 1.0; };
  md.column_l1_sup = 1.0;
  md.unit_bounded = true;
  return StructureMap::lazy(
      [](BasisIndex i, std::size_t cutoff) {
        RawColumn col;
        double kept = 0.0;
        for (BasisIndex k = 0; k < cutoff; ++k) {
          double x = std::ldexp(1.0, -static_cast<int>(k) - 2);
          if (k == i + 1) x += 0.5;
          col.entries.push_back({k, x});
          kept += x;
        }
        col.tail_l1 = std::max(0.0, 1.0 - kept);
        return col;
      },
      md);
}

}  // namespace

TEST_CASE("explicit map reproduces the dense product") {
  std::mt19937_64 rng(7);
  const TruncationPolicy p{64, 1e-12, 1e-12};
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 9;
    DenseAlgebra dense{random_matrix(n, rng)};
    auto s = to_map(dense.c);
    const Vec v = random_vec(n, rng);
    const Vec w = random_vec(n, rng);
    auto got = product(s, to_element(v), to_element(w), p);
    CHECK(max_diff(got, dense.product(v, w)) < 1e-12);
    CHECK(got.exact());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(max_diff(square_basis(s, i, p), dense.square(i)) == 0.0);
    }
  }
}

TEST_CASE("natural basis annihilates and the product commutes") {
  auto s = geometric_lazy();
  const TruncationPolicy p{40, 1e-12, 1e-9};
  for (BasisIndex i = 0; i < 10; ++i) {
    for (BasisIndex j = 0; j < 10; ++j) {
      auto r = product(s, Element::basis(i), Element::basis(j), p);
      if (i != j) {
        CHECK(r.support_size() == 0);
        CHECK(r.tail_bound() == 0.0);
      } else {
        CHECK(r == square_basis(s, i, p));
      }
    }
  }
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto v = to_element(random_vec(12, rng));
    auto w = to_element(random_vec(12, rng));
    CHECK(product(s, v, w, p) == product(s, w, v, p));
  }
}

TEST_CASE("lazy columns carry certified tails") {
  auto s = geometric_lazy();
  auto col = s.column(3, 10);
  REQUIRE(col.tail_l1);
  CHECK(*col.tail_l1 == doctest::Approx(std::ldexp(1.0, -11)));
  // l1 tail below 1 of a unit-bounded column bounds the l2 tail by sqrt(T).
  CHECK(*col.tail_l2 <= std::sqrt(*col.tail_l1) + 1e-15);

  const TruncationPolicy tight{10, 1e-12, 1e-6};
  try {
    square_basis(s, 3, tight);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TailTooLarge);
  }
  const TruncationPolicy loose{10, 1e-12, 1e-1};
  auto sq = square_basis(s, 3, loose);
  CHECK(sq.tail_bound() > 0.0);
  CHECK(sq.coefficient(4) == doctest::Approx(0.5 + std::ldexp(1.0, -6)));
}

TEST_CASE("explicit map metadata") {
  auto s = to_map({{1.0, 0.0}, {2.0, -3.0}});
  const auto& md = s.metadata();
  CHECK(s.kind() == StructureKind::ExplicitSparse);
  REQUIRE(md.extent);
  CHECK(*md.extent == 2);
  CHECK(*md.column_l1_sup == 3.0);
  CHECK(*md.row_l1_sup == 5.0);
  CHECK(md.column_l1(0) == 3.0);

  // Truncating an explicit column reports the exact l2 of what was dropped.
  auto col = s.column(0, 1);
  CHECK(*col.tail_l1 == 2.0);
  CHECK(*col.tail_l2 == 2.0);
}

TEST_CASE("left multiplication matches product") {
  std::mt19937_64 rng(11);
  DenseAlgebra dense{random_matrix(8, rng)};
  auto s = to_map(dense.c);
  const TruncationPolicy p{8, 1e-12, 1e-12};
  auto v = to_element(random_vec(8, rng));
  LeftMultiplication lv(s, v, p);
  for (int trial = 0; trial < 5; ++trial) {
    auto w = to_element(random_vec(8, rng));
    CHECK(lv.apply(w, p) == product(s, v, w, p));
  }
}

TEST_CASE("continuity bound dominates the product") {
  std::mt19937_64 rng(5);
  DenseAlgebra dense{random_matrix(6, rng)};
  auto s = to_map(dense.c);
  const TruncationPolicy p{6, 1e-12, 1e-12};
  auto v = to_element(random_vec(6, rng));
  auto b = continuity_bound(s, v, p);
  CHECK(b.exact);
  for (int trial = 0; trial < 50; ++trial) {
    auto w = to_element(random_vec(6, rng));
    CHECK(norm(product(s, v, w, p)).value <= b.m_v * norm(w).value + 1e-12);
  }
  CHECK_THROWS_AS(continuity_bound(s, v.with_tail_bound(0.1), p), Error);
}

TEST_CASE("product propagates input tails") {
  auto s = geometric_lazy();
  const TruncationPolicy p{64, 1e-12, 1e-3};
  auto v = Element::basis(0).with_tail_bound(1e-6);
  auto r = product(s, v, Element::basis(0), p);
  CHECK(r.tail_bound() > 0.0);
  CHECK(r.tail_bound() <= 1e-6);
  CHECK(r.tail_bound() < 1e-4);
}
