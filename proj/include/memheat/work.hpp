#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memheat/field.hpp"
#include "memheat/history.hpp"
#include "memheat/kernel.hpp"
#include "memheat/vec.hpp"

namespace memheat {

enum class WorkMethod { CausalDouble, Swapped, Symmetrized, GeneralState, Spectral, Definition };

std::string to_string(WorkMethod method);

struct WorkResult {
  double value = 0.0;
  WorkMethod method = WorkMethod::Symmetrized;
  double error_estimate = 0.0;
};

/// One-sided transform F(omega) = integral of f(t) e^(-i omega t) over t >= 0,
/// stored for omega >= 0 (F(-omega) is the conjugate).
struct SpectralDensity {
  std::vector<double> omega;
  std::vector<CVec3> values;
};

/// I(tau, g^t) = -integral of k(tau + s) g^t(s) over s >= 0.
Vec3 work_I_term(const RelaxationKernel& kernel, const SampledField& g_t, double tau);

/// Integral of I(tau, g^t) . g_P(tau) over [0, T], by exact product integration.
struct Pairing {
  double value = 0.0;
  double error_estimate = 0.0;
};
Pairing work_I_pairing(const RelaxationKernel& kernel, const SampledField& g_t, const Process& p);

/// Work done on the zero history by P, in one of the three time-domain forms:
///   CausalDouble  integral over tau of g_P(tau) . integral_0^tau k(s) g_P(tau - s) ds
///   Swapped       integral over s of g_P(s) . integral_s^T k(tau - s) g_P(tau) dtau
///   Symmetrized   (1/2) double integral of k(|tau - s|) g_P(s) . g_P(tau)
/// The first two use adaptive outer quadrature over exact inner convolutions;
/// the symmetrized form is integrated exactly over cell pairs for the
/// piecewise-linear process.
WorkResult zero_history_work(const RelaxationKernel& kernel, const Process& p,
                             WorkMethod form = WorkMethod::Symmetrized);

/// Work from state history g^t along P: symmetrized term minus the I pairing.
/// Throws InfiniteFlux when g^t has no finite flux.
WorkResult thermal_work(const RelaxationKernel& kernel, const SampledField& g_t, const Process& p);

/// The same work computed straight from its definition,
/// -integral over [0, T] of q(t + tau) . g_P(tau), with q from heat_flux_after.
WorkResult thermal_work_definition(const RelaxationKernel& kernel, const SampledField& g_t,
                                   const Process& p, double tol = 1e-11);

/// Transform of f at each frequency. A nonzero Constant tail contributes
/// c e^(-i omega S) / (i omega) and throws DivergentTransform at omega = 0.
SpectralDensity fourier_plus(const SampledField& f, const std::vector<double>& omega_grid);

/// Frequency grid parameters. omega_max <= 0 selects panels of width pi / span,
/// where span is the support length of the fields involved.
struct SpectralOptions {
  double omega_max = 0.0;
  int n_omega = 2048;
};

/// Work evaluated in the frequency domain:
///   (1/2 pi) [ integral k_c |g_+|^2 domega - integral I_+ . conj(g_+) domega ]
/// over the real line. The error estimate combines the frequency quadrature,
/// a bound on the neglected high-frequency terms and the interpolation error
/// of the sampled I-term.
WorkResult spectral_work(const RelaxationKernel& kernel, const SampledField& g_t, const Process& p,
                         const SpectralOptions& opts = {});

/// <f, phi>_k = integral over the real line of k_c(omega) f_+ . conj(phi_+).
/// Both fields need bounded support (or a zero Constant tail).
struct SpectralValue {
  double value = 0.0;
  double error_estimate = 0.0;
};
SpectralValue inner_product_k(const RelaxationKernel& kernel, const SampledField& f,
                              const SampledField& phi, const SpectralOptions& opts = {});
/// <phi, phi>_k, the square of the induced norm.
SpectralValue norm_k(const RelaxationKernel& kernel, const SampledField& phi,
                     const SpectralOptions& opts = {});

/// Finite-work test: norm_k is finite and stable when the frequency range doubles.
bool in_finite_work_space(const RelaxationKernel& kernel, const SampledField& phi,
                          const SpectralOptions& opts = {});

struct AdmissibilityReport {
  bool admissible = true;
  std::size_t worst_probe = 0;
  double worst_value = 0.0;
  double worst_change = 0.0;
  std::string diagnostic;
};

/// Checks that (1/2 pi) integral I_+ . conj(g_+) stays finite and converges
/// under frequency-range doubling for every probe process.
AdmissibilityReport admissibility_check(const RelaxationKernel& kernel, const SampledField& g_t,
                                        const std::vector<Process>& probes,
                                        const SpectralOptions& opts = {});

struct WorkEquivalenceReport {
  bool equivalent = true;
  std::size_t worst_probe = 0;
  double max_difference = 0.0;
};

/// |W(g1, P) - W(g2, P)| <= tol (1 + |W(g1, P)|) for every probe.
WorkEquivalenceReport work_equivalence_report(const RelaxationKernel& kernel,
                                              const SampledField& g1, const SampledField& g2,
                                              const std::vector<Process>& probes, double tol);
bool work_equivalence_check(const RelaxationKernel& kernel, const SampledField& g1,
                            const SampledField& g2, const std::vector<Process>& probes,
                            double tol);

/// Seeded probe processes: piecewise-linear gradients with 8 equispaced knots
/// on [0, 2], components uniform in [-1, 1], zero afterwards; duration 2.
std::vector<Process> random_probe_processes(std::uint64_t seed, int count);

}  // namespace memheat
