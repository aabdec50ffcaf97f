#include <doctest.h>

#include <cmath>

#include "opineq/envelope.hpp"
#include "opineq/scalaropt.hpp"

using namespace opineq;

namespace {

double brute_max(const Objective& f, const BoxDomain& box, int res) {
  const std::size_t n = box.arity();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  double best = -INFINITY;
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = box[i].lo + (box[i].hi - box[i].lo) * double(idx[i]) / double(res - 1);
    }
    best = std::max(best, f(x));
    std::size_t axis = n;
    while (axis > 0 && ++idx[axis - 1] == std::size_t(res)) idx[--axis] = 0;
    if (axis == 0) break;
  }
  return best;
}

}  // namespace

TEST_SUITE("scalaropt") {
  TEST_CASE("closed-form maxima") {
    const BoxDomain unit({{1.0, 2.0}});
    const auto r = box_maximize([](std::span<const double> x) { return -(x[0] - 1.5) * (x[0] - 1.5); }, unit);
    CHECK(std::abs(r.value) <= 1e-9);
    CHECK(r.argpoint[0] == doctest::Approx(1.5).epsilon(1e-6));

    const BoxDomain sq({{0.0, 1.0}, {0.0, 1.0}});
    const auto lin = box_maximize([](std::span<const double> x) { return x[0] + x[1]; }, sq);
    CHECK(lin.value == doctest::Approx(2.0));
    CHECK(lin.argpoint == std::vector<double>{1.0, 1.0});

    // Kantorovich objective; the dense-grid oracle gives 9/8 at 3/2
    const auto k = box_maximize([](std::span<const double> x) { return x[0] * (-x[0] / 2 + 1.5); }, unit);
    CHECK(std::abs(k.value - 1.125) <= 1e-9);
    CHECK(std::abs(brute_max([](std::span<const double> x) { return x[0] * (-x[0] / 2 + 1.5); }, unit, 1000001) - 1.125) <= 1e-12);
  }

  TEST_CASE("closed-form minima") {
    const BoxDomain unit({{1.0, 2.0}});
    const auto r = box_minimize([](std::span<const double> x) { return (x[0] - 1.5) * (x[0] - 1.5); }, unit);
    CHECK(std::abs(r.value) <= 1e-9);
    const auto lin = box_minimize([](std::span<const double> x) { return x[0] + x[1]; },
                                  BoxDomain({{0.0, 1.0}, {0.0, 1.0}}));
    CHECK(lin.value == doctest::Approx(0.0));
    CHECK(lin.argpoint == std::vector<double>{0.0, 0.0});

    const auto s = box_minimize([](std::span<const double> x) { return 1 / x[0] + x[0] / 2; }, unit);
    CHECK(std::abs(s.value - std::sqrt(2.0)) <= 1e-12);
    CHECK(s.argpoint[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }

  TEST_CASE("errors") {
    const BoxDomain unit({{-1.0, 1.0}});
    CHECK_THROWS_AS(box_maximize([](std::span<const double> x) { return std::log(x[0]); }, unit), DomainError);
    CHECK_THROWS_AS(box_maximize([](std::span<const double> x) { return 1.0 / x[0] * 0.0 + NAN; }, unit),
                    DomainError);
    std::vector<Interval> seven(7, Interval{0.0, 1.0});
    CHECK_THROWS(box_maximize([](std::span<const double>) { return 0.0; }, BoxDomain(seven)));
  }
}

TEST_SUITE("envelope") {
  TEST_CASE("affine functions are their own envelope") {
    const MultiFunc f = Separable{{ScalarFunc1D::affine(2, 0.5), ScalarFunc1D::affine(2, 0.5)}};
    const BoxDomain box({{0.0, 1.0}, {-1.0, 3.0}});
    const auto env = fit_envelope(f, box);
    CHECK(env.a == std::vector<double>{2, 2});
    CHECK(env.c == std::vector<double>{2, 2});
    CHECK(std::abs(env.b - 1.0) <= 1e-10);
    CHECK(std::abs(env.d - 1.0) <= 1e-10);
    const auto chk = validate_envelope(f, env, box);
    CHECK(chk.ok());
    CHECK(chk.worst_gap == 0.0);
  }

  TEST_CASE("chord of the reciprocal on [1, 2]") {
    const MultiFunc f = Separable{{ScalarFunc1D::reciprocal()}};
    const BoxDomain box({{1.0, 2.0}});
    const auto env = fit_envelope(f, box);
    CHECK(env.c[0] == doctest::Approx(-0.5));
    CHECK(std::abs(env.d - 1.5) <= 1e-12);
    CHECK(env.a[0] == doctest::Approx(-0.5));
    CHECK(std::abs(env.b - std::sqrt(2.0)) <= 1e-12);

    auto shrunk = env;
    shrunk.d -= 0.1;
    const auto bad = validate_envelope(f, shrunk, box);
    CHECK(bad.violations >= 1);
    CHECK(bad.worst_gap == doctest::Approx(0.1));
  }

  TEST_CASE("constants") {
    const MultiFunc f = MultiFunc::constant(2, 5.0);
    const auto env = fit_envelope(f, BoxDomain({{0.0, 1.0}, {0.0, 1.0}}));
    CHECK(env.a == std::vector<double>{0, 0});
    CHECK(env.c == std::vector<double>{0, 0});
    CHECK(env.b == 5.0);
    CHECK(env.d == 5.0);
  }

  TEST_CASE("fits validate for every supported form") {
    const std::vector<ScalarFunc1D> us{ScalarFunc1D::power(3.0), ScalarFunc1D::power(-0.5),
                                       ScalarFunc1D::log(-2.0), ScalarFunc1D::exp(),
                                       ScalarFunc1D::polynomial({1, -3, 0.5, 1.2}), ScalarFunc1D::reciprocal()};
    const BoxDomain box({{0.3, 1.7}, {1.0, 2.5}, {0.4, 0.9}});
    for (const auto& u : us) {
      for (const MultiFunc& f : {MultiFunc(Separable{{u, u, u}}), MultiFunc(CompositeAffine{{0.5, 0.2, 1.0}, u})}) {
        EnvelopeCheck chk;
        fit_envelope(f, box, kEnvelopeGrid, &chk);
        CHECK(chk.ok());
        CHECK(chk.nodes == 201LL * 201 * 201);
      }
    }
  }

  TEST_CASE("undefined functions are rejected") {
    CHECK_THROWS_AS(fit_envelope(Separable{{ScalarFunc1D::log()}}, BoxDomain({{-1.0, 1.0}})), DomainError);
  }
}
