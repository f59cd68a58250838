#pragma once

#include "memheat/field.hpp"
#include "memheat/vec.hpp"

namespace memheat {

/// A process of duration T: temperature rate and gradient on [0, T).
///
/// The gradient is a Zero-tail field whose nodes lie in [0, T]; values past T
/// are never used. theta_dot is scalar.
class Process {
 public:
  Process(double duration, SampledField theta_dot, SampledField g);
  /// Gradient-only process (theta_dot = 0). A negative duration selects the
  /// last node of g.
  static Process from_gradient(SampledField g, double duration = -1.0);

  double duration() const { return duration_; }
  const SampledField& theta_dot() const { return theta_dot_; }
  const SampledField& g() const { return g_; }

  /// P1 followed by P2, of duration T1 + T2.
  friend Process concatenate(const Process& p1, const Process& p2);

 private:
  double duration_;
  SampledField theta_dot_;
  SampledField g_;
};

/// Temperature and translated gradient history g^t(s) = g(t - s), s >= 0.
struct ThermodynamicState {
  double theta = 0.0;
  SampledField g_translated = SampledField::zero();

  static ThermodynamicState zero(double theta0) { return {theta0, SampledField::zero()}; }
};

/// Integrated history gbar(s) = integral of g^t over [0, s].
///
/// Node values are exact; between nodes the field is interpolated linearly.
/// A Constant-tail gradient makes gbar grow linearly past the last node with
/// slope tail_slope.
struct IntegratedHistory {
  SampledField gbar = SampledField::zero();
  Vec3 tail_slope{0.0, 0.0, 0.0};

  Vec3 at(double s) const;
};

/// State reached after running P for time t in [0, T) from the given state.
ThermodynamicState state_from_process(const ThermodynamicState& initial, const Process& p,
                                      double t);

IntegratedHistory integrated_from_translated(const SampledField& g);

/// (g_P * g_hist)(s): g_P(tau - s) for s < tau, g_hist(s - tau) for s >= tau.
SampledField prolong_translated(const SampledField& g_hist, const Process& p, double tau);

/// Integrated counterpart of prolong_translated.
IntegratedHistory prolong_integrated(const IntegratedHistory& gbar_hist, const Process& p,
                                     double tau);

}  // namespace memheat
