#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "memheat/errors.hpp"
#include "memheat/history.hpp"

using namespace memheat;
using Catch::Matchers::WithinAbs;

namespace {

const Vec3 e1{1.0, 0.0, 0.0};

SampledField ramp(double length) {
  return SampledField({0.0, length}, {{0, 0, 0}, {length, 0, 0}}, Tail::Zero);
}

SampledField random_field(std::mt19937_64& rng, int knots, double length, Tail tail) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> s;
  std::vector<Vec3> v;
  for (int i = 0; i < knots; ++i) {
    s.push_back(length * i / (knots - 1));
    v.push_back({u(rng), u(rng), u(rng)});
  }
  return SampledField(s, v, tail);
}

}  // namespace

TEST_CASE("process validation") {
  CHECK_THROWS_AS(Process::from_gradient(SampledField::constant(e1)), ValidationError);
  CHECK_THROWS_AS(Process(1.0, SampledField::zero(1), SampledField::indicator(2.0, e1)), ValidationError);
  CHECK_THROWS_AS(Process(0.0, SampledField::zero(1), SampledField::zero()), ValidationError);
  const Process p = Process::from_gradient(SampledField::indicator(1.5, e1));
  CHECK(p.duration() == 1.5);
}

TEST_CASE("state from process") {
  const Process zero(3.0, SampledField::zero(1), SampledField::zero());
  const auto s0 = state_from_process(ThermodynamicState::zero(5.0), zero, 1.2);
  CHECK(s0.theta == 5.0);
  CHECK(s0.g_translated.is_zero());

  const Process heat(3.0, SampledField::indicator(3.0, {1.0, 0.0, 0.0}, 1), SampledField::zero());
  CHECK_THAT(state_from_process(ThermodynamicState::zero(5.0), heat, 2.0).theta, WithinAbs(7.0, 1e-15));

  const ThermodynamicState init{0.0, SampledField::constant(e1)};
  const Process still(2.0, SampledField::zero(1), SampledField::zero());
  const auto s = state_from_process(init, still, 1.0);
  CHECK(s.g_translated.at(0.5)[0] == 0.0);
  CHECK(s.g_translated.at(1.0)[0] == 1.0);
  CHECK(s.g_translated.at(9.0)[0] == 1.0);

  CHECK_THROWS_AS(state_from_process(init, still, 2.0), DomainError);
}

TEST_CASE("integrated history") {
  CHECK(integrated_from_translated(SampledField::zero()).gbar.is_zero());
  const auto a = integrated_from_translated(SampledField::indicator(2.0, e1));
  CHECK_THAT(a.at(2.0)[0], WithinAbs(2.0, 1e-15));
  CHECK_THAT(a.at(5.0)[0], WithinAbs(2.0, 1e-15));
  CHECK(a.at(0.0)[0] == 0.0);
  const auto b = integrated_from_translated(ramp(1.0));
  CHECK_THAT(b.at(1.0)[0], WithinAbs(0.5, 1e-15));
  const auto c = integrated_from_translated(SampledField::constant(e1));
  CHECK_THAT(c.at(4.5)[0], WithinAbs(4.5, 1e-14));
}

TEST_CASE("integrated history is linear") {
  // Node values are exact; between nodes the integral is interpolated, so the
  // fields share a grid here.
  std::mt19937_64 rng(11);
  const SampledField g1 = random_field(rng, 7, 3.0, Tail::Zero);
  const SampledField g2 = random_field(rng, 7, 3.0, Tail::Constant);
  const auto lhs = integrated_from_translated(linear_combination(0.7, g1, -2.0, g2));
  const auto f1 = integrated_from_translated(g1);
  const auto f2 = integrated_from_translated(g2);
  for (double s : {0.0, 0.3, 1.0, 2.2, 2.9, 4.0}) {
    for (int i = 0; i < 3; ++i) {
      CHECK_THAT(lhs.at(s)[i], WithinAbs(0.7 * f1.at(s)[i] - 2.0 * f2.at(s)[i], 1e-12));
    }
  }
}

TEST_CASE("prolongation of translated histories") {
  const Process unit = Process::from_gradient(SampledField::indicator(1.0, e1));
  const SampledField a = prolong_translated(SampledField::zero(), unit, 1.0);
  CHECK(a.at(0.0)[0] == 1.0);
  CHECK(a.at(0.99)[0] == 1.0);
  CHECK(a.at(1.0)[0] == 0.0);

  const Vec3 two{2.0, 0.0, 0.0};
  const Process steady = Process::from_gradient(SampledField::indicator(3.0, two));
  const SampledField b = prolong_translated(SampledField::constant(two), steady, 1.7);
  for (double s : {0.0, 0.5, 1.7, 4.0}) CHECK(b.at(s)[0] == 2.0);

  const Process rp = Process::from_gradient(ramp(1.0), 1.0);
  const SampledField hist({0.0, 10.0}, {{0, 0, 0}, {10, 0, 0}}, Tail::Zero);
  const SampledField c = prolong_translated(hist, rp, 1.0);
  for (double s : {0.0, 0.25, 0.75}) CHECK_THAT(c.at(s)[0], WithinAbs(1.0 - s, 1e-15));
  for (double s : {1.0, 1.5, 4.0}) CHECK_THAT(c.at(s)[0], WithinAbs(s - 1.0, 1e-15));

  CHECK_THROWS_AS(prolong_translated(hist, rp, 1.5), DomainError);
  CHECK_THROWS_AS(prolong_translated(hist, rp, 0.0), DomainError);
}

TEST_CASE("prolongation of integrated histories") {
  const Process unit = Process::from_gradient(SampledField::indicator(1.0, e1));
  const auto z = prolong_integrated(integrated_from_translated(SampledField::zero()), unit, 1.0);
  for (double s : {0.0, 0.4, 0.9}) CHECK_THAT(z.at(s)[0], WithinAbs(s, 1e-15));
  for (double s : {1.0, 3.0}) CHECK_THAT(z.at(s)[0], WithinAbs(1.0, 1e-15));

  const Process still(2.0, SampledField::zero(1), SampledField::zero());
  const auto h = integrated_from_translated(ramp(2.0));
  const auto r = prolong_integrated(h, still, 0.5);
  CHECK(r.at(0.3)[0] == 0.0);
  CHECK_THAT(r.at(1.5)[0], WithinAbs(h.at(1.0)[0], 1e-15));
}

TEST_CASE("integration commutes with prolongation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Tail tail = trial % 2 ? Tail::Constant : Tail::Zero;
    const SampledField g = random_field(rng, 6, 2.5, tail);
    const Process p = Process::from_gradient(random_field(rng, 8, 2.0, Tail::Zero), 2.0);
    const double tau = 0.3 + 1.7 * trial / 19.0;
    const auto lhs = integrated_from_translated(prolong_translated(g, p, tau));
    const auto rhs = prolong_integrated(integrated_from_translated(g), p, tau);
    for (double s = 0.0; s < 8.0; s += 0.173) {
      for (int i = 0; i < 3; ++i) CHECK_THAT(lhs.at(s)[i], WithinAbs(rhs.at(s)[i], 1e-12));
    }
  }
}

TEST_CASE("prolongation semigroup") {
  std::mt19937_64 rng(9);
  const SampledField g = random_field(rng, 5, 1.0, Tail::Zero);
  const Process p1 = Process::from_gradient(random_field(rng, 4, 0.75, Tail::Zero), 0.75);
  const Process p2 = Process::from_gradient(random_field(rng, 6, 1.25, Tail::Zero), 1.25);
  const SampledField twice = prolong_translated(prolong_translated(g, p1, 0.75), p2, 1.25);
  const SampledField once = prolong_translated(g, concatenate(p1, p2), 2.0);
  for (double s = 0.0; s < 4.0; s += 0.0625) {
    for (int i = 0; i < 3; ++i) CHECK_THAT(twice.at(s)[i], WithinAbs(once.at(s)[i], 1e-14));
  }
}

TEST_CASE("zero history is absorbing under the zero process") {
  const Process still(1.0, SampledField::zero(1), SampledField::zero());
  CHECK(prolong_translated(SampledField::zero(), still, 0.5).is_zero());
  CHECK(prolong_integrated(IntegratedHistory{}, still, 0.5).gbar.is_zero());
}
