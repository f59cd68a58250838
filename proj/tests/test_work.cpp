#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

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
const Process unit = Process::from_gradient(SampledField::indicator(1.0, e1));

constexpr WorkMethod forms[] = {WorkMethod::CausalDouble, WorkMethod::Swapped, WorkMethod::Symmetrized};

// -integral over [0, T] of q(t + tau) . g_P(tau), q from prolonged fluxes.
double definition_oracle(const RelaxationKernel& k, const SampledField& g, const Process& p) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(
      [&](double tau) { return -dot(heat_flux_after(k, g, p, tau).q, p.g().at(tau)); }, 0.0,
      p.duration(), 8, 1e-12);
}

}  // namespace

TEST_CASE("I-term") {
  CHECK(work_I_term(expo, SampledField::zero(), 0.7)[0] == 0.0);
  CHECK_THAT(work_I_term(expo, SampledField::constant(e1), 0.0)[0], WithinAbs(-1.0, 1e-13));
  CHECK_THAT(work_I_term(expo, SampledField::constant(e1), 1.0)[0], WithinAbs(-std::exp(-1.0), 1e-13));
}

TEST_CASE("zero-history work in three forms") {
  const Process still(1.0, SampledField::zero(1), SampledField::zero());
  for (auto f : forms) {
    CHECK(zero_history_work(expo, still, f).value == 0.0);
    const auto r = zero_history_work(expo, unit, f);
    CHECK(r.method == f);
    CHECK_THAT(r.value, WithinRel(std::exp(-1.0), 1e-10));
  }
  // (1/2) double integral of k(|tau - s|) over the unit square = integral of (1 - u) k(u).
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = ts.integrate([](double u) { return (1.0 - u) * std::exp(-u) / std::sqrt(u); }, 0.0, 1.0);
  for (auto f : forms) CHECK_THAT(zero_history_work(abel, unit, f).value, WithinRel(oracle, 1e-7));
}

TEST_CASE("three forms agree on random probes") {
  const auto probes = random_probe_processes(2024, 8);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto k = RelaxationKernel::damped_abel(1.0, alpha, 1.0);
    for (const auto& p : probes) {
      const double s = zero_history_work(k, p, WorkMethod::Symmetrized).value;
      CHECK(s >= 0.0);
      CHECK_THAT(zero_history_work(k, p, WorkMethod::CausalDouble).value, WithinRel(s, 1e-6));
      CHECK_THAT(zero_history_work(k, p, WorkMethod::Swapped).value, WithinRel(s, 1e-6));
    }
  }
  for (const auto& p : probes) {
    const double s = zero_history_work(expo, p, WorkMethod::Symmetrized).value;
    CHECK_THAT(zero_history_work(expo, p, WorkMethod::CausalDouble).value, WithinRel(s, 1e-8));
  }
}

TEST_CASE("work from a constant-gradient state") {
  // The gradient stays constant, so the flux stays -mass and the work is mass * T.
  const auto a = thermal_work(expo, SampledField::constant(e1), unit);
  CHECK(a.method == WorkMethod::GeneralState);
  CHECK_THAT(a.value, WithinAbs(1.0, 1e-10));
  CHECK_THAT(thermal_work(abel, SampledField::constant(e1), unit).value,
             WithinAbs(std::sqrt(std::numbers::pi), 1e-9));
  CHECK_THAT(thermal_work_definition(expo, SampledField::constant(e1), unit).value, WithinAbs(1.0, 1e-9));
  CHECK_THAT(definition_oracle(expo, SampledField::constant(e1), unit), WithinAbs(1.0, 1e-9));
}

TEST_CASE("general-state work matches the definition") {
  const SampledField g({0.0, 0.5, 1.5}, {{1, 0, -1}, {0.2, 0.4, 0}, {-0.5, 1, 0.3}}, Tail::Constant);
  const auto probes = random_probe_processes(99, 3);
  for (const auto& k : {expo, abel}) {
    for (const auto& p : probes) {
      const double w = thermal_work(k, g, p).value;
      CHECK_THAT(thermal_work_definition(k, g, p).value, WithinAbs(w, 1e-8 * (1.0 + std::fabs(w))));
    }
  }
  CHECK_THAT(definition_oracle(abel, g, probes[0]),
             WithinAbs(thermal_work(abel, g, probes[0]).value, 1e-7));
}

TEST_CASE("work reduces to zero-history work and vanishes for still processes") {
  const auto probes = random_probe_processes(5, 2);
  for (const auto& p : probes) {
    CHECK_THAT(thermal_work(abel, SampledField::zero(), p).value,
               WithinRel(zero_history_work(abel, p).value, 1e-14));
  }
  const Process still(1.0, SampledField::zero(1), SampledField::zero());
  CHECK(thermal_work(expo, SampledField::constant(e1), still).value == 0.0);
}

TEST_CASE("work is quadratic") {
  const SampledField g({0.0, 1.0}, {{1, 2, 0}, {0, 1, 1}}, Tail::Zero);
  const Process p = random_probe_processes(8, 1).front();
  const Process p3 = Process::from_gradient(p.g().scaled(3.0), p.duration());
  const double w = thermal_work(abel, g, p).value;
  CHECK_THAT(thermal_work(abel, g.scaled(3.0), p3).value, WithinRel(9.0 * w, 1e-12));
}

TEST_CASE("histories without finite flux are rejected") {
  std::vector<double> s;
  std::vector<Vec3> v;
  for (int i = 0; i <= 600; ++i) {
    s.push_back(0.1 * i);
    v.push_back({std::exp(0.2 * i), 0.0, 0.0});
  }
  const SampledField growth(s, v, Tail::Zero);
  CHECK_THROWS_AS(thermal_work(expo, growth, unit), InfiniteFlux);
}

TEST_CASE("work equivalence") {
  const SampledField pair({0.0, 1.0, 1.0, 2.0}, {{1, 0, 0}, {1, 0, 0}, {-std::numbers::e, 0, 0}, {-std::numbers::e, 0, 0}},
                          Tail::Zero);
  const auto probes = random_probe_processes(1, 10);
  CHECK(work_equivalence_check(expo, pair, pair, probes, 1e-6));
  CHECK(work_equivalence_check(expo, pair, SampledField::zero(), probes, 1e-6));
  CHECK_FALSE(work_equivalence_check(expo, SampledField::constant(e1), SampledField::zero(), probes, 1e-6));
  const auto rep = work_equivalence_report(expo, pair, SampledField::zero(), probes, 1e-6);
  CHECK(rep.max_difference < 1e-10);
}

TEST_CASE("probe processes are reproducible") {
  const auto a = random_probe_processes(42, 3);
  const auto b = random_probe_processes(42, 3);
  const auto c = random_probe_processes(43, 3);
  REQUIRE(a.size() == 3);
  CHECK(a[0].duration() == 2.0);
  CHECK(a[0].g().size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].g().values() == b[i].g().values());
    for (const Vec3& v : a[i].g().values()) {
      for (double x : v) CHECK(std::fabs(x) <= 1.0);
    }
  }
  CHECK(a[0].g().values() != c[0].g().values());
}
