#pragma once

#include <string>
#include <vector>

#include "memheat/field.hpp"
#include "memheat/history.hpp"
#include "memheat/kernel.hpp"
#include "memheat/vec.hpp"

namespace memheat {

struct FluxResult {
  Vec3 q{0.0, 0.0, 0.0};
  double quadrature_error = 0.0;
  /// Upper limit standing in for infinity: max(last history node, kernel horizon).
  double truncation_point = 0.0;
};

/// R(tau) = integral over s >= 0 of k(s + tau) g(s), by product integration
/// against exact kernel moments. Constant tails are added in closed form.
struct ShiftedIntegral {
  Vec3 value{0.0, 0.0, 0.0};
  double abs_error = 0.0;
};
ShiftedIntegral shifted_integral(const RelaxationKernel& kernel, const SampledField& g, double tau);
/// Same integral with the history cut off at s = horizon.
ShiftedIntegral shifted_integral_truncated(const RelaxationKernel& kernel, const SampledField& g,
                                           double tau, double horizon);

struct MembershipReport {
  bool member = true;
  double worst_tau = 0.0;
  Vec3 worst_value{0.0, 0.0, 0.0};
  /// Relative change of the last horizon doubling at worst_tau.
  double worst_change = 0.0;
  std::string diagnostic;
};

/// Finite-flux test for every shift in tau_grid (which must contain 0).
///
/// The history is cut at horizons T_inf, 2 T_inf, ... until the support is
/// covered; the shift passes when the last doubling changes the integral by at
/// most 1e-8 relative to the absolute integral.
MembershipReport gamma_membership(const RelaxationKernel& kernel, const SampledField& g,
                                  const std::vector<double>& tau_grid);

/// State with a history checked for finite flux; throws InfiniteFlux otherwise.
ThermodynamicState make_state(const RelaxationKernel& kernel, double theta, SampledField g);

/// q = -integral of k(s) g(s) over s >= 0. Throws InfiniteFlux when the
/// history fails the tau = 0 membership test.
FluxResult heat_flux(const RelaxationKernel& kernel, const SampledField& g);

/// Flux after prolonging g by P for time t_prolong.
FluxResult heat_flux_after(const RelaxationKernel& kernel, const SampledField& g, const Process& p,
                           double t_prolong);

/// Smallest a (to bisection resolution) with |R(a)|, |R(2a)|, |R(4a)| < epsilon,
/// searched on [0, 2 T_inf]. Throws NotAttained when 2 T_inf fails.
double fading_memory_horizon(const RelaxationKernel& kernel, const SampledField& g, double epsilon);

/// 0 followed by 40 geometric shifts from 1e-4 T_inf to T_inf.
std::vector<double> default_tau_grid(const RelaxationKernel& kernel);

std::vector<Vec3> equivalence_residual(const RelaxationKernel& kernel, const SampledField& g_diff,
                                       const std::vector<double>& tau_grid);

struct EquivalenceReport {
  bool equivalent = false;
  double max_residual = 0.0;
  double worst_tau = 0.0;
  double threshold = 0.0;
};

/// max |R(tau; g1 - g2)| <= tol (1 + |q(g1)|) over tau_grid (default grid when empty).
EquivalenceReport equivalence_report(const RelaxationKernel& kernel, const SampledField& g1,
                                     const SampledField& g2, double tol = 1e-8,
                                     const std::vector<double>& tau_grid = {});
bool histories_equivalent(const RelaxationKernel& kernel, const SampledField& g1,
                          const SampledField& g2, double tol = 1e-8);

}  // namespace memheat
