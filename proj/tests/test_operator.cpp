#include <cmath>
#include <random>
#include <string>

#include <doctest.h>

#include "dense_oracle.hpp"
#include "hevo/error.hpp"
#include "hevo/evolution_operator.hpp"
#include "hevo/markov.hpp"
#include "support.hpp"

using namespace hevo;
using namespace hevo::testing;

namespace {

StructureMap renewal_map(std::size_t cutoff) {
  return to_structure_map(build_renewal(ProbabilitySequence::geometric(0.5, 1)),
                          {cutoff, 1e-12, 1e-6});
}

}  // namespace

TEST_CASE("evolution_apply agrees with square_basis and linearity") {
  auto s = renewal_map(64);
  const TruncationPolicy p{64, 1e-12, 1e-6};
  for (BasisIndex i = 0; i < 10; ++i) {
    CHECK(evolution_apply(s, Element::basis(i), p) == square_basis(s, i, p));
  }
  auto v = Element::from_entries({{0, 0.3}, {2, -1.0}, {5, 2.0}});
  auto w = Element::from_entries({{1, 1.5}, {2, 0.25}});
  auto lhs = evolution_apply(s, axpy(-2.0, v, w), p);
  auto rhs = axpy(-2.0, evolution_apply(s, v, p), evolution_apply(s, w, p));
  for (BasisIndex k = 0; k < 64; ++k) {
    CHECK(std::abs(lhs.coefficient(k) - rhs.coefficient(k)) <= 1e-12 * 3.0);
  }
}

TEST_CASE("in_domain") {
  auto finite = to_map({{0.5, 0.0}, {0.5, 1.0}});
  auto v = Element::from_entries({{0, 1.0}, {1, 1.0}});
  auto d = in_domain(finite, v, {8, 1e-12, 1e-6});
  CHECK(d.within_cutoff);
  CHECK(d.bound == doctest::Approx(0.25 + 2.25));

  auto renewal = renewal_map(32);
  auto r = in_domain(renewal, Element::basis(0), {32, 1e-12, 1e-6});
  CHECK(r.within_cutoff);
  CHECK(r.bound <= 1.0 + 1e-12);

  StructureMetadata md;
  auto no_meta = StructureMap::lazy(
      [](BasisIndex i, std::size_t cutoff) {
        RawColumn c;
        for (BasisIndex k = 0; k < cutoff; ++k) c.entries.push_back({k, 1.0 / (1.0 + i + k)});
        return c;
      },
      md);
  auto inc = in_domain(no_meta, Element::basis(0), {32, 1e-12, 1e-6});
  CHECK_FALSE(inc.within_cutoff);
  CHECK_FALSE(inc.diagnostic.empty());
}

TEST_CASE("Hilbert-Schmidt certificate") {
  Mat block(5, Vec(5, 0.1));
  auto c = certify_hilbert_schmidt(to_map(block), {16, 1e-12, 1e-6});
  REQUIRE(c.certified());
  CHECK(std::get<HilbertSchmidt>(c.verdict).hs_sum == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(*c.norm_bound == doctest::Approx(0.5).epsilon(1e-14));

  auto zero = certify_hilbert_schmidt(to_map(Mat(3, Vec(3, 0.0))), {16, 1e-12, 1e-6});
  REQUIRE(zero.certified());
  CHECK(*zero.norm_bound == 0.0);

  auto id = to_structure_map(build_identity(), {40, 1e-12, 1e-6});
  auto none = certify_hilbert_schmidt(id, {40, 1e-12, 1e-6});
  CHECK_FALSE(none.certified());
  CHECK(std::get<Inconclusive>(none.verdict).partial_sum == 40.0);
}

TEST_CASE("Schur certificates on the reference chains") {
  const TruncationPolicy p{128, 1e-12, 1e-6};
  auto hoc = to_structure_map(build_house_of_cards(ProbabilitySequence::geometric(0.5, 0)), p);
  auto c = certify_schur(hoc, Weights::unit(), Weights::unit(), p);
  REQUIRE(c.certified());
  CHECK(std::get<Schur>(c.verdict).m1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::get<Schur>(c.verdict).m2 == doctest::Approx(1.0).epsilon(1e-12));

  auto r = certify_schur(renewal_map(128), Weights::unit(), Weights::unit(), p);
  REQUIRE(r.certified());
  CHECK(std::get<Schur>(r.verdict).m1 == doctest::Approx(1.0));
  CHECK(std::get<Schur>(r.verdict).m2 == 2.0);
  CHECK(*r.norm_bound == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.measured_sup == doctest::Approx(1.5));

  const TruncationPolicy p100{100, 1e-12, 1e-6};
  auto hocc = to_structure_map(build_house_of_cards(ProbabilitySequence::constant(0.5)), p100);
  auto none = certify_schur(hocc, Weights::unit(), Weights::unit(), p100);
  REQUIRE_FALSE(none.certified());
  const auto& inc = std::get<Inconclusive>(none.verdict);
  CHECK(inc.at == 0);
  CHECK(inc.partial_sum == doctest::Approx(50.0));
  CHECK(render(none).rfind("INCONCLUSIVE ", 0) == 0);
  CHECK(render(none).find("still growing") != std::string::npos);
}

TEST_CASE("weighted Schur on a finite map") {
  auto s = to_map({{0.0, 4.0}, {1.0, 0.0}});
  auto alpha = Weights::from_function([](BasisIndex k) { return k == 0 ? 2.0 : 1.0; });
  auto beta = Weights::from_function([](BasisIndex i) { return i == 0 ? 1.0 : 2.0; });
  auto c = certify_schur(s, alpha, beta, {8, 1e-12, 1e-6});
  REQUIRE(c.certified());
  // Column i: sum_k |c_ki| alpha_k / beta_i; row k: sum_i |c_ki| beta_i / alpha_k.
  CHECK(std::get<Schur>(c.verdict).m1 == doctest::Approx(4.0));
  CHECK(std::get<Schur>(c.verdict).m2 == doctest::Approx(4.0));

  auto bad = Weights::from_function([](BasisIndex) { return 0.0; });
  try {
    certify_schur(s, bad, beta, {8, 1e-12, 1e-6});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidWeights);
  }
}

TEST_CASE("rowsum certificate") {
  const TruncationPolicy p{64, 1e-12, 1e-6};
  auto r = certify_rowsum(renewal_map(64), p);
  REQUIRE(r.certified());
  CHECK(std::get<RowSum>(r.verdict).m == 2.0);
  CHECK(render(r) == "CERTIFIED RowSum norm_bound=1.4142135623730951 cutoff=64");

  auto id = certify_rowsum(to_structure_map(build_identity(), p), p);
  REQUIRE(id.certified());
  CHECK(*id.norm_bound == 1.0);

  try {
    certify_rowsum(to_map({{0.5, 0.0}, {0.0, 1.0}}), p);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotMarkov);
  }
}

TEST_CASE("power_apply") {
  auto s = renewal_map(20);
  const TruncationPolicy p{20, 1e-12, 1e-3};
  auto one = power_apply(s, Element::basis(3), 1, p);
  CHECK(one.value == evolution_apply(s, Element::basis(3), p));

  auto two = power_apply(s, Element::basis(1), 2, p, std::sqrt(2.0));
  for (BasisIndex k = 1; k < 20; ++k) {
    CHECK(two.value.coefficient(k) == doctest::Approx(std::ldexp(1.0, -static_cast<int>(k))));
  }
  auto e0 = power_apply(s, Element::basis(0), 2, p, std::sqrt(2.0));
  CHECK(e0.value.coefficient(0) == doctest::Approx(0.5));

  // Composition within accumulated tails.
  auto a = power_apply(s, Element::basis(0), 5, p, std::sqrt(2.0));
  auto mid = power_apply(s, Element::basis(0), 2, p, std::sqrt(2.0));
  auto b = power_apply(s, mid.value, 3, p, std::sqrt(2.0));
  for (BasisIndex k = 0; k < 20; ++k) {
    CHECK(std::abs(a.value.coefficient(k) - b.value.coefficient(k)) <=
          a.value.tail_bound() + b.value.tail_bound() + 1e-12);
  }

  auto no_bound = StructureMap::lazy(
      [](BasisIndex i, std::size_t) {
        return RawColumn{{{i, 1.0}}, std::optional<double>(0.5)};
      },
      StructureMetadata{});
  const TruncationPolicy loose{8, 1e-12, 10.0};
  try {
    power_apply(no_bound, Element::basis(0), 2, loose);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingCertificate);
  }
  auto best = power_apply(no_bound, Element::basis(0), 2, loose, std::nullopt,
                          TailPropagation::BestEffort);
  CHECK_FALSE(best.tail_certified);
}

TEST_CASE("empirical lower bound is below certificates") {
  const TruncationPolicy p{64, 1e-9, 1e-6};
  auto id = to_structure_map(build_identity(), p);
  CHECK(empirical_norm_lower_bound(id, 20, 1, p) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(empirical_norm_lower_bound(to_map(Mat(3, Vec(3, 0.0))), 5, 1, p) == 0.0);

  auto r = renewal_map(64);
  const double lb = empirical_norm_lower_bound(r, 200, 9, p);
  CHECK(lb > 1.0);
  CHECK(lb <= std::sqrt(2.0) + 1e-9);
  CHECK(lb == empirical_norm_lower_bound(r, 200, 9, p));
}
