#include <doctest.h>

#include <cmath>

#include "opineq/sobolev.hpp"
#include "support.hpp"

using namespace opineq;
using namespace opineq::testing;

namespace {

InequalityInstance singleton(HermitianOperator a, Interval box, MultiFunc f) {
  InequalityInstance inst;
  const Index dim = a.dim();
  inst.axes = {{std::move(a)}};
  inst.box = BoxDomain({box});
  inst.weights = WeightFamily(std::vector<std::vector<double>>{{1.0}});
  inst.grid = MapGrid({1}, {PositiveLinearMap::identity(dim)});
  inst.f = std::move(f);
  inst.g = MultiFunc::constant(1, 1.0);
  inst.envelope = fit_envelope(inst.f, inst.box);
  return inst;
}

const MultiFunc kIdentity = Separable{{ScalarFunc1D::identity()}};

}  // namespace

TEST_SUITE("sobolev") {
  TEST_CASE("conjugate exponents") {
    CHECK(sobolev_conjugate(3, 2.0).q == 6.0);
    CHECK(sobolev_conjugate(4, 2.0).q == 4.0);
    CHECK(sobolev_conjugate(5, 1.25).q == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(sobolev_conjugate(3, 3.0), InputError);
    CHECK_THROWS_AS(sobolev_conjugate(2, 1.0), InputError);
    CHECK_THROWS_AS(sobolev_conjugate(1, 0.5), InputError);
  }

  TEST_CASE("C2") {
    const auto e = sobolev_conjugate(3, 2.0);
    CHECK(constant_C2(MultiFunc::constant(1, 1.0), BoxDomain({{1, 2}}), e) == doctest::Approx(1.0));
    CHECK(std::abs(constant_C2(kIdentity, BoxDomain({{1, 2}}), e) - std::pow(2.0, -2.0 / 3.0)) <= 1e-12);
    CHECK(constant_C2_spectral(1.0, 2.0, e) == doctest::Approx(std::pow(2.0, -2.0 / 3.0)));
    CHECK_THROWS_AS(constant_C2(kIdentity, BoxDomain({{-1, 2}}), e), DomainError);
  }

  TEST_CASE("C3") {
    const auto e = sobolev_conjugate(3, 2.0);
    CHECK(std::abs(constant_C3(kIdentity, BoxDomain({{1, 2}}), e) - 4.0) <= 1e-12);
    CHECK(std::abs(constant_C3(Separable{{ScalarFunc1D::affine(2, 0)}}, BoxDomain({{0, 1}}), e) - 1.0 / 16.0) <= 1e-12);
    CHECK(std::abs(constant_C3(Separable{{ScalarFunc1D::affine(1, 100)}}, BoxDomain({{1, 2}}), e) - 102.0 * 102.0) <=
          1e-9);
    CHECK_THROWS_AS(constant_C3(MultiFunc::constant(1, 2.0), BoxDomain({{1, 2}}), e), DomainError);
  }

  TEST_CASE("scalar lemma grids") {
    const auto e = sobolev_conjugate(3, 2.0);
    const MultiFunc f = CompositeAffine{{0.5, 0.8}, ScalarFunc1D::log(2.0)};
    const BoxDomain box({{0.5, 1.5}, {1.0, 2.0}});
    const double c3 = constant_C3(f, box, e);
    CHECK(lemma_C3_violations(f, box, e, c3) == 0);
    CHECK(lemma_C3_violations(f, box, e, 0.5 * c3) > 0);

    const MultiFunc h = grad_magnitude_power_func(f, e.q);
    const double c2 = constant_C2(h, box, e);
    CHECK(lemma_C2_violations(h, box, e, c2) == 0);
    CHECK(lemma_C2_violations(h, box, e, 1.5 * c2) > 0);
  }

  TEST_CASE("original inequality, closed-form singleton") {
    const auto e = sobolev_conjugate(3, 2.0);
    const auto inst = singleton(HermitianOperator::diagonal({1.5}), {1, 2}, kIdentity);
    const auto rep = verify_sobolev_original(inst, e);
    const auto& k = rep.constants;
    CHECK(std::abs(k.C3 - 4.0) <= 1e-12);
    CHECK(std::abs(k.C2 - std::pow(1.5, -2.0 / 3.0)) <= 1e-12);
    CHECK(std::abs(k.C1 - std::pow(4.0, 1.0 / 6.0) * std::pow(1.5, 2.0 / 3.0)) <= 1e-12);
    CHECK(rep.bound.theorem == "sobolev");
    CHECK(rep.bound.verdict.holds);
    CHECK(rep.bound.verdict.margin == doctest::Approx(k.C1 - 1.5));
    CHECK(rep.bound.admissible);
  }

  TEST_CASE("mean inequality, closed-form singleton") {
    const auto e = sobolev_conjugate(3, 2.0);
    const auto inst = singleton(HermitianOperator::diagonal({1.5}), {1, 2}, kIdentity);
    const auto rep = verify_sobolev_mean(inst, e);
    const auto& k = rep.constants;
    CHECK(k.C4_prime == doctest::Approx(1.0));
    CHECK(std::abs(k.K - 4.0) <= 1e-9);
    CHECK(std::abs(k.C4 - 2.0) <= 1e-9);
    CHECK(k.C4_stated == doctest::Approx(std::pow(4.0, 1.0 / 6.0)));
    CHECK(rep.bound.verdict.holds);
    // the stated constant would not bound |1.5|
    CHECK(k.C4_stated < 1.5);
  }

  TEST_CASE("vanishing f holds trivially") {
    const auto e = sobolev_conjugate(4, 2.0);
    Rng rng(3);
    const auto inst = singleton(HermitianOperator::diagonal({0.5, 1.0}), {0, 2}, MultiFunc::constant(1, 0.0));
    for (const auto& rep : {verify_sobolev_original(inst, e), verify_sobolev_mean(inst, e)}) {
      CHECK(rep.trivial);
      CHECK(rep.bound.verdict.holds);
      CHECK(max_abs(rep.bound.lhs.matrix()) == 0.0);
    }
    CHECK(embedding_norms(inst, e).l_norm == 0.0);
  }

  TEST_CASE("embedding norms") {
    const auto e = sobolev_conjugate(3, 2.0);
    const auto inst = singleton(HermitianOperator::diagonal({1.5}), {1, 2}, kIdentity);
    const auto n = embedding_norms(inst, e);
    CHECK(n.w_norm == doctest::Approx(1.0));
    CHECK(n.l_norm == doctest::Approx(1.5));
    CHECK(n.member());
    CHECK(n.l_norm <= verify_sobolev_original(inst, e).constants.C1 * n.w_norm);
  }

  TEST_CASE("admissibility") {
    CHECK(sobolev_admissible(CompositeAffine{{1, 2}, ScalarFunc1D::exp()}));
    CHECK(sobolev_admissible(Separable{{ScalarFunc1D::exp(), ScalarFunc1D::constant(1)}}));
    CHECK_FALSE(sobolev_admissible(Separable{{ScalarFunc1D::exp(), ScalarFunc1D::exp()}}));
  }
}
