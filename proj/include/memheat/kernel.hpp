#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace memheat {

enum class KernelFamily { Exponential, DampedAbel, Tabulated };

std::string to_string(KernelFamily family);

/// Integrals of the kernel over one cell [s0, s1].
struct CellMoments {
  double m0 = 0.0;        ///< integral of k(s)
  double m1 = 0.0;        ///< integral of s k(s)
  double m1_local = 0.0;  ///< integral of (s - s0) k(s)
  double abs_error = 0.0;
};

/// Heat-flux relaxation function k(t) on t > 0.
///
/// Three families are provided:
///   Exponential  k(t) = k0 exp(-t / tau_r)           regular, k(0) = k0
///   DampedAbel   k(t) = c t^(-alpha) exp(-beta t)    integrable, unbounded at 0
///   Tabulated    log-linear interpolation of positive nonincreasing samples,
///                extended past the last sample with the last segment's decay rate
///
/// Objects are immutable after construction; every member is safe to call
/// concurrently.
class RelaxationKernel {
 public:
  static RelaxationKernel exponential(double k0, double tau_r);
  static RelaxationKernel damped_abel(double c, double alpha, double beta);
  /// Samples (t_i, k_i) with t_0 = 0, k positive and nonincreasing, and a
  /// strictly decreasing last segment.
  static RelaxationKernel tabulated(std::vector<double> t, std::vector<double> k);

  KernelFamily family() const { return family_; }
  bool singular_at_origin() const { return family_ == KernelFamily::DampedAbel; }
  /// Singularity exponent alpha; 0 for kernels bounded at the origin.
  double singularity_exponent() const { return singular_at_origin() ? alpha_ : 0.0; }
  /// k0 for Exponential, c for DampedAbel, k(0) for Tabulated.
  double strength() const { return strength_; }
  /// 1/tau_r for Exponential, beta for DampedAbel, terminal decay rate for Tabulated.
  double rate() const { return rate_; }
  const std::vector<double>& table_t() const { return table_t_; }
  const std::vector<double>& table_k() const { return table_k_; }

  /// k(0) for kernels bounded at the origin; empty for singular kernels.
  std::optional<double> initial_value() const;

  /// k(t). Throws SingularEvaluation at t = 0 on a singular kernel and
  /// DomainError for t < 0.
  double operator()(double t) const;

  /// Integral of k over [0, inf).
  double mass() const { return mass_; }
  /// Integral of k over [a, inf).
  double tail_mass(double a) const;
  /// Fourier cosine transform: integral of k(t) cos(omega t) over [0, inf).
  double cosine_transform(double omega) const;

  CellMoments cell_moments(double s0, double s1) const;
  /// Integrals of (s - s0)^m k(s) over [s0, s1] for m = 0..3.
  std::array<double, 4> local_moments(double s0, double s1) const;

  /// Smallest a with tail_mass(a) <= 1e-10 * mass().
  double truncation_horizon() const { return horizon_; }

 private:
  RelaxationKernel() = default;
  void finalize();
  std::size_t segment_of(double t) const;
  double segment_rate(std::size_t i) const;

  KernelFamily family_ = KernelFamily::Exponential;
  double strength_ = 1.0;
  double rate_ = 1.0;
  double alpha_ = 0.0;
  std::vector<double> table_t_, table_k_;
  std::vector<double> seg_rate_;     // decay rate on [t_i, t_{i+1}], last entry for the extension
  std::vector<double> suffix_mass_;  // integral of k over [t_i, inf)
  double mass_ = 0.0;
  double horizon_ = 0.0;
};

double eval_kernel(const RelaxationKernel& kernel, double t);
double tail_mass(const RelaxationKernel& kernel, double a);
double cosine_transform(const RelaxationKernel& kernel, double omega);
CellMoments cell_moments(const RelaxationKernel& kernel, double s0, double s1);

/// Energy relation e = alpha0 (theta - theta0).
struct ConductorParams {
  double alpha0 = 1.0;
  double theta0 = 0.0;

  void validate() const;
  double internal_energy(double theta) const { return alpha0 * (theta - theta0); }
};

}  // namespace memheat
