#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "memheat/errors.hpp"
#include "memheat/quadrature.hpp"

using namespace memheat;
using namespace memheat::quad;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("singular anchor: t^(-1/2) e^(-t) on [0, 1]") {
  const double exact = std::sqrt(std::numbers::pi) * boost::math::erf(1.0);
  const auto r = adaptive_singular([](double t) { return std::pow(t, -0.5) * std::exp(-t); }, 0.0,
                                   1.0, 0.5, 1e-12);
  CHECK_THAT(r.value, WithinAbs(exact, 1e-9));
  CHECK_THAT(r.value, WithinAbs(1.493648265624854, 1e-9));
}

TEST_CASE("adaptive Gauss-Kronrod on smooth integrands") {
  const auto r = integrate_adaptive([](double t) { return std::sin(t); }, 0.0, std::numbers::pi);
  CHECK_THAT(r.value, WithinAbs(2.0, 1e-13));
  CHECK(r.abs_error_estimate < 1e-10);
  CHECK(r.evaluations > 0);
}

TEST_CASE("non-integrable integrand exhausts the subdivision budget") {
  AdaptiveOptions o;
  o.max_subdivisions = 12;
  CHECK_THROWS_AS(integrate_adaptive([](double t) { return 1.0 / t; }, 0.0, 1.0, o),
                  QuadratureFailure);
}

TEST_CASE("graded substitution handles derivative singularities") {
  const auto r = integrate_graded([](double t) { return std::sqrt(t); }, 0.0, 1.0, 4.0,
                                  GradedEnd::Left);
  CHECK_THAT(r.value, WithinAbs(2.0 / 3.0, 1e-13));
  const auto s = integrate_graded([](double t) { return std::sqrt(1.0 - t); }, 0.0, 1.0, 4.0,
                                  GradedEnd::Right);
  CHECK_THAT(s.value, WithinAbs(2.0 / 3.0, 1e-13));
}

TEST_CASE("Gauss-Legendre rules are exact for degree 2n-1") {
  for (int n : {2, 5, 16}) {
    const auto& g = gauss_legendre(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) sum += g.weights[i] * std::pow(g.nodes[i], 2 * n - 2);
    CHECK_THAT(sum, WithinRel(2.0 / (2 * n - 1), 1e-14));
  }
}

TEST_CASE("graded mesh nodes") {
  const GradedMesh m{2.0, 4, 2.0};
  const auto x = m.nodes();
  REQUIRE(x.size() == 5);
  CHECK(x.front() == 0.0);
  CHECK(x.back() == 2.0);
  CHECK_THAT(x[1], WithinAbs(2.0 / 16.0, 1e-15));
  CHECK(GradedMesh::for_singularity(1.0, 8, 0.5).grading_exponent >= 1.0);
  CHECK_THROWS_AS((GradedMesh{1.0, 1, 1.0}.nodes()), ValidationError);
}

TEST_CASE("Filon rule is exact for piecewise-linear data") {
  const SampledField f = SampledField::indicator(1.0, {1.0, 0.0, 0.0});
  for (double w : {1e-6, 1e-4, 0.3, 1.0, 25.0}) {
    const double half = std::sin(0.5 * w);
    const std::complex<double> exact(std::sin(w) / w, -2.0 * half * half / w);
    const CVec3 v = filon_linear(f, w);
    CAPTURE(w);
    CHECK(std::abs(v[0] - exact) < 1e-13);
  }
  // Ramp s on [0, 1]: integral of s e^(-i w s).
  const SampledField ramp({0.0, 1.0}, {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, Tail::Zero);
  const double w = 2.0;
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> exact =
      (std::exp(-i * w) * (1.0 + i * w) - 1.0) / (w * w);
  CHECK(std::abs(filon_linear(ramp, w)[0] - exact) < 1e-14);
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000, 0.1);
  CHECK_THAT(pairwise_sum(v), WithinRel(100.0, 1e-14));
  CHECK(pairwise_sum({}) == 0.0);
}
