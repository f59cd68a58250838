#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/tools/roots.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "memheat/errors.hpp"
#include "memheat/flux.hpp"
#include "memheat/work.hpp"

using namespace memheat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Vec3 e1{1.0, 0.0, 0.0};
const auto expo = RelaxationKernel::exponential(1.0, 1.0);
const auto abel = RelaxationKernel::damped_abel(1.0, 0.5, 1.0);

SampledField equivalent_pair(double b) {
  return SampledField({0.0, 1.0, 1.0, 2.0}, {{1, 0, 0}, {1, 0, 0}, {b, 0, 0}, {b, 0, 0}}, Tail::Zero);
}

SampledField sampled(double (*f)(double), double length, int n, Tail tail) {
  std::vector<double> s(n + 1);
  std::vector<Vec3> v(n + 1);
  for (int i = 0; i <= n; ++i) {
    s[i] = length * i / n;
    v[i] = {f(s[i]), 0.0, 0.0};
  }
  return SampledField(s, v, tail);
}

}  // namespace

TEST_CASE("constant-gradient flux anchors") {
  CHECK(heat_flux(expo, SampledField::zero()).q[0] == 0.0);
  const auto a = heat_flux(expo, SampledField::constant(e1));
  CHECK_THAT(a.q[0], WithinAbs(-1.0, 1e-12));
  CHECK(a.q[1] == 0.0);
  const auto b = heat_flux(abel, SampledField::constant(e1));
  CHECK_THAT(b.q[0], WithinAbs(-std::sqrt(std::numbers::pi), 1e-10));
  CHECK(b.truncation_point >= abel.truncation_horizon());
  CHECK(std::isfinite(b.quadrature_error));
}

TEST_CASE("flux after prolongation") {
  const Process unit = Process::from_gradient(SampledField::indicator(1.0, e1));
  const auto r = heat_flux_after(expo, SampledField::zero(), unit, 1.0);
  CHECK_THAT(r.q[0], WithinAbs(-(1.0 - std::exp(-1.0)), 1e-13));

  const Process still(1.0, SampledField::zero(1), SampledField::zero());
  CHECK(heat_flux_after(expo, SampledField::zero(), still, 0.5).q[0] == 0.0);

  const Process steady = Process::from_gradient(SampledField::indicator(2.0, e1));
  for (const auto& k : {expo, abel}) {
    const double q0 = heat_flux(k, SampledField::constant(e1)).q[0];
    for (double t : {0.3, 1.0, 2.0}) {
      CHECK_THAT(heat_flux_after(k, SampledField::constant(e1), steady, t).q[0], WithinRel(q0, 1e-11));
    }
  }
}

TEST_CASE("prolongation by a vanishing time recovers the flux") {
  const SampledField g = sampled([](double s) { return std::cos(s); }, 3.0, 30, Tail::Zero);
  const Process p = Process::from_gradient(sampled([](double s) { return 1.0 - s; }, 1.0, 4, Tail::Zero));
  const double q = heat_flux(abel, g).q[0];
  double prev = HUGE_VAL;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const double d = std::fabs(heat_flux_after(abel, g, p, t).q[0] - q);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("flux is linear in the history") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> s{0.0, 0.4, 1.0, 2.5};
  std::vector<Vec3> v1, v2;
  for (int i = 0; i < 4; ++i) {
    v1.push_back({u(rng), u(rng), u(rng)});
    v2.push_back({u(rng), u(rng), u(rng)});
  }
  const SampledField g1(s, v1, Tail::Constant), g2(s, v2, Tail::Zero);
  for (const auto& k : {expo, abel}) {
    const Vec3 lhs = heat_flux(k, linear_combination(2.0, g1, -0.5, g2)).q;
    const Vec3 a = heat_flux(k, g1).q, b = heat_flux(k, g2).q;
    for (int i = 0; i < 3; ++i) CHECK_THAT(lhs[i], WithinAbs(2.0 * a[i] - 0.5 * b[i], 1e-12));
  }
}

TEST_CASE("finite-flux membership") {
  const auto grid = default_tau_grid(expo);
  CHECK(grid.size() == 41);
  CHECK(grid.front() == 0.0);
  CHECK(gamma_membership(expo, SampledField::zero(), grid).member);
  CHECK(gamma_membership(expo, SampledField::constant(e1), grid).member);

  // e^(2s) sampled far past the kernel horizon.
  const SampledField growth = sampled([](double s) { return std::exp(2.0 * s); }, 60.0, 600, Tail::Zero);
  const auto rep = gamma_membership(expo, growth, grid);
  CHECK_FALSE(rep.member);
  CHECK_FALSE(rep.diagnostic.empty());
  CHECK_THROWS_AS(heat_flux(expo, growth), InfiniteFlux);
  CHECK_THROWS_AS(make_state(expo, 0.0, growth), InfiniteFlux);
  CHECK_NOTHROW(make_state(abel, 1.0, SampledField::constant(e1)));
}

TEST_CASE("fading memory horizon") {
  CHECK_THAT(fading_memory_horizon(expo, SampledField::constant(e1), 0.01), WithinAbs(std::log(100.0), 1e-3));
  CHECK(fading_memory_horizon(expo, SampledField::zero(), 0.01) == 0.0);
  // |R(a)| = Gamma(1/2, a) for the damped Abel kernel.
  const auto root = boost::math::tools::bisect(
      [](double a) { return boost::math::tgamma(0.5, a) - 0.01; }, 1.0, 10.0,
      boost::math::tools::eps_tolerance<double>(50));
  const double exact = 0.5 * (root.first + root.second);
  CHECK_THAT(fading_memory_horizon(abel, SampledField::constant(e1), 0.01), WithinAbs(exact, 1e-3));
  CHECK_THROWS_AS(fading_memory_horizon(expo, SampledField::constant(e1), 1e-30), NotAttained);
}

TEST_CASE("equivalence residual") {
  const auto grid = default_tau_grid(expo);
  for (const Vec3& r : equivalence_residual(expo, SampledField::zero(), grid)) CHECK(r[0] == 0.0);
  for (const Vec3& r : equivalence_residual(expo, equivalent_pair(-std::numbers::e), grid)) {
    CHECK(std::fabs(r[0]) < 1e-10);
  }
  const auto r0 = equivalence_residual(expo, SampledField::indicator(1.0, e1), {0.0});
  CHECK_THAT(r0[0][0], WithinAbs(1.0 - std::exp(-1.0), 1e-14));

  // Exponential kernels: R(tau) = e^(-tau) R(0).
  const SampledField g({0.0, 0.7, 1.9}, {{0.3, -1, 2}, {1.1, 0.2, 0}, {-0.4, 0.5, 1}}, Tail::Constant);
  const auto r = equivalence_residual(expo, g, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int c = 0; c < 3; ++c) CHECK_THAT(r[i][c], WithinRel(std::exp(-grid[i]) * r[0][c], 1e-10));
  }
}

TEST_CASE("history equivalence") {
  const SampledField g = SampledField::constant(e1);
  CHECK(histories_equivalent(abel, g, g, 1e-8));
  CHECK(histories_equivalent(expo, equivalent_pair(-std::numbers::e), SampledField::zero(), 1e-8));
  CHECK_FALSE(histories_equivalent(expo, equivalent_pair(-1.01 * std::numbers::e), SampledField::zero(), 1e-8));
  CHECK_FALSE(histories_equivalent(expo, g, g.scaled(2.0), 1e-8));
  const auto rep = equivalence_report(expo, g, g.scaled(2.0));
  CHECK_FALSE(rep.equivalent);
  CHECK_THAT(rep.max_residual, WithinAbs(1.0, 1e-12));
}

TEST_CASE("equivalent histories give equal prolonged fluxes") {
  const SampledField g1 = equivalent_pair(-std::numbers::e);
  const SampledField g2 = SampledField::zero();
  REQUIRE(histories_equivalent(expo, g1, g2, 1e-8));
  const auto probes = random_probe_processes(17, 10);
  for (const auto& p : probes) {
    for (double t : {0.1, 0.5, 1.0, 1.5, 2.0}) {
      const Vec3 a = heat_flux_after(expo, g1, p, t).q;
      const Vec3 b = heat_flux_after(expo, g2, p, t).q;
      CHECK(max_abs(a - b) <= 1e-7);
    }
  }
}

TEST_CASE("product integration converges at second order for smooth histories") {
  auto f = [](double s) { return std::cos(s) * std::exp(-0.2 * s); };
  auto flux_n = [&](int n) {
    std::vector<double> s(n + 1);
    std::vector<Vec3> v(n + 1);
    for (int i = 0; i <= n; ++i) {
      s[i] = 6.0 * i / n;
      v[i] = {f(s[i]), 0.0, 0.0};
    }
    return heat_flux(abel, SampledField(s, v, Tail::Zero)).q[0];
  };
  const double ref = flux_n(20480);
  const double e1 = std::fabs(flux_n(40) - ref);
  const double e2 = std::fabs(flux_n(80) - ref);
  CHECK(e1 / e2 >= 3.0);
}
