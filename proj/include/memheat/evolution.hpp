#pragma once

#include <array>
#include <functional>
#include <vector>

#include "memheat/field.hpp"
#include "memheat/kernel.hpp"

namespace memheat {

/// 1D memory heat equation on [0, L]:
///   u_t = -q_x + r,   q(x, t) = -integral over s >= 0 of k(s) u_x(x, t - s)
/// with Dirichlet data at both ends and a prescribed gradient history for t < 0.
struct EvolutionProblem {
  RelaxationKernel kernel = RelaxationKernel::exponential(1.0, 1.0);
  double length = 1.0;
  int nx = 0;  ///< number of cells; nodes x_i = i L / nx, faces at cell midpoints
  double t_end = 0.0;
  double dt = 0.0;
  std::vector<double> initial_u{};  ///< nx + 1 node values
  /// Gradient history u_x(face, -s) per face (scalar fields); empty means zero history.
  std::vector<SampledField> initial_history{};
  std::function<double(double)> left{};    ///< u(0, t); empty means 0
  std::function<double(double)> right{};   ///< u(L, t); empty means 0
  std::function<double(double, double)> source{};  ///< r(x, t); empty means 0
  /// Store every stride-th step (the last step is always stored).
  int snapshot_stride = 1;
  /// Skip the stability precheck.
  bool skip_stability_check = false;

  double dx() const { return length / nx; }
  int steps() const;
  void validate() const;
};

struct EvolutionDiagnostics {
  double max_history_error = 0.0;  ///< largest quadrature error of the history inflow
  double amplification = 0.0;      ///< stability precheck result (0 when skipped)
  std::vector<double> max_abs_u;   ///< per snapshot
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<int> steps;                ///< step index of each snapshot
  std::vector<std::vector<double>> u;    ///< per snapshot, nx + 1 node values
  std::vector<std::vector<double>> q;    ///< per snapshot, nx face fluxes
  std::vector<double> x_nodes, x_faces;
  EvolutionDiagnostics diagnostics;
};

/// Product-integration convolution quadrature: the face gradient is piecewise
/// constant in time, the newest weight is implicit and the history explicit.
/// Throws StabilityFailure when the precheck fails.
EvolutionResult evolve(const EvolutionProblem& problem);

/// Face fluxes of snapshot t_index; throws IndexError when out of range.
const std::vector<double>& flux_field(const EvolutionResult& result, std::size_t t_index);

/// max_i |u^{n+1}_i - u^n_i - dt (-(q_{i+1/2} - q_{i-1/2}) / dx + r_i)| over
/// interior nodes, for consecutive stored snapshots n, n + 1.
double conservation_residual(const EvolutionProblem& problem, const EvolutionResult& result,
                             std::size_t n);

/// Product-integration weights: integral of k over [j dt, (j + 1) dt].
std::vector<double> convolution_weights(const RelaxationKernel& kernel, double dt, int count);

/// Largest |u^n| of the scalar mode recurrence
///   (1 + lambda_dt w_0) u^{n+1} = u^n - lambda_dt sum_{j>=1} w_j u^{n+1-j},  u^0 = 1,
/// run for weights.size() steps.
double estimate_amplification(const std::vector<double>& weights, double lambda_dt);

/// Reference solution for exponential kernels from the equivalent local system
///   u_t = -q_x + r,  tau_r q_t + q = -k0 tau_r u_x,
/// integrated by Crank-Nicolson at dt / 10 on the same grid. Snapshots match
/// those of evolve. Throws WrongKernelFamily for other kernels.
EvolutionResult telegraph_oracle(const EvolutionProblem& problem);

/// Exact solution of one spatial mode u = a(t) sin(k x), q = b(t) cos(k x) of the
/// local system with gradient factor sigma (k for the continuum, (2/dx) sin(k dx / 2)
/// for the centred grid): a' = sigma b, b' = -b / tau_r - k0 sigma a.
std::array<double, 2> telegraph_mode_solution(double k0, double tau_r, double sigma,
                                              double a0, double b0, double t);

}  // namespace memheat
