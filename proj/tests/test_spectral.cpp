#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "memheat/errors.hpp"
#include "memheat/work.hpp"

using namespace memheat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Vec3 e1{1.0, 0.0, 0.0};
const auto expo = RelaxationKernel::exponential(1.0, 1.0);
const auto abel = RelaxationKernel::damped_abel(1.0, 0.5, 1.0);
const Process unit = Process::from_gradient(SampledField::indicator(1.0, e1));

}  // namespace

TEST_CASE("one-sided transform") {
  const SampledField ind = SampledField::indicator(1.0, e1);
  const auto d = fourier_plus(ind, {0.0, std::numbers::pi});
  CHECK_THAT(d.values[0][0].real(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(std::abs(d.values[1][0]), WithinAbs(2.0 / std::numbers::pi, 1e-14));
  CHECK_THAT(d.values[1][0].imag(), WithinAbs(-2.0 / std::numbers::pi, 1e-14));
  CHECK(std::abs(fourier_plus(SampledField::zero(), {1.0}).values[0][0]) == 0.0);

  // A constant tail adds c e^(-i w S) / (i w).
  const auto c = fourier_plus(SampledField::constant(e1), {2.0});
  const std::complex<double> i(0.0, 1.0);
  CHECK(std::abs(c.values[0][0] - 1.0 / (i * 2.0)) < 1e-14);
  CHECK_THROWS_AS(fourier_plus(SampledField::constant(e1), {0.0}), DivergentTransform);
}

TEST_CASE("induced norm of the unit indicator") {
  const auto n = norm_k(expo, SampledField::indicator(1.0, e1));
  CHECK_THAT(n.value, WithinAbs(2.0 * std::numbers::pi * std::exp(-1.0), std::max(1e-4, n.error_estimate)));
  CHECK(norm_k(expo, SampledField::zero()).value == 0.0);
  CHECK(in_finite_work_space(abel, SampledField::indicator(1.0, e1)));
}

TEST_CASE("inner product is symmetric and satisfies Cauchy-Schwarz") {
  const auto probes = random_probe_processes(77, 4);
  for (const auto& k : {expo, abel}) {
    for (std::size_t a = 0; a + 1 < probes.size(); ++a) {
      const SampledField& f = probes[a].g();
      const SampledField& g = probes[a + 1].g();
      const double fg = inner_product_k(k, f, g).value;
      CHECK_THAT(inner_product_k(k, g, f).value, WithinAbs(fg, 1e-10));
      CHECK(fg * fg <= norm_k(k, f).value * norm_k(k, g).value * (1.0 + 1e-9));
    }
  }
  CHECK(inner_product_k(abel, SampledField::zero(), probes[0].g()).value == 0.0);
}

TEST_CASE("spectral work matches time-domain work") {
  const auto z = spectral_work(expo, SampledField::zero(), unit);
  CHECK(z.method == WorkMethod::Spectral);
  CHECK_THAT(z.value, WithinAbs(std::exp(-1.0), 1e-4));
  CHECK_THAT(spectral_work(abel, SampledField::zero(), unit).value,
             WithinAbs(zero_history_work(abel, unit).value, 1e-3));
  const Process still(1.0, SampledField::zero(1), SampledField::zero());
  CHECK(spectral_work(abel, SampledField::zero(), still).value == 0.0);

  const SampledField g({0.0, 0.5, 1.5}, {{1, 0, -1}, {0.2, 0.4, 0}, {-0.5, 1, 0.3}}, Tail::Constant);
  for (const auto& k : {expo, abel}) {
    for (const auto& p : random_probe_processes(3, 3)) {
      const auto s = spectral_work(k, g, p);
      const double t = thermal_work(k, g, p).value;
      CHECK(std::fabs(s.value - t) <= std::max(1e-4, s.error_estimate));
    }
  }
}

TEST_CASE("zero-history spectral work is the weighted energy of the transform") {
  const auto p = random_probe_processes(12, 1).front();
  const double w = spectral_work(abel, SampledField::zero(), p).value;
  const auto n = norm_k(abel, p.g());
  CHECK_THAT(w, WithinAbs(n.value / (2.0 * std::numbers::pi), 1e-6));
}

TEST_CASE("admissibility") {
  const auto probes = random_probe_processes(4, 3);
  const auto z = admissibility_check(expo, SampledField::zero(), probes);
  CHECK(z.admissible);
  CHECK(z.worst_value == 0.0);
  std::vector<Process> indicators{unit, Process::from_gradient(SampledField::indicator(2.0, {0, 1, 0}))};
  CHECK(admissibility_check(expo, SampledField::constant(e1), indicators).admissible);

  std::vector<double> s;
  std::vector<Vec3> v;
  for (int i = 0; i <= 600; ++i) {
    s.push_back(0.1 * i);
    v.push_back({std::exp(0.2 * i), 0.0, 0.0});
  }
  const auto bad = admissibility_check(expo, SampledField(s, v, Tail::Zero), probes);
  CHECK_FALSE(bad.admissible);
  CHECK_FALSE(bad.diagnostic.empty());
}
