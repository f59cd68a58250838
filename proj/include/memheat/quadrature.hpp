#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "memheat/field.hpp"
#include "memheat/vec.hpp"

namespace memheat::quad {

template <class T>
struct QuadratureReport {
  T value{};
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

/// Nodes t_j = t_max * (j / n)^grading_exponent, j = 0..n.
struct GradedMesh {
  double t_max = 1.0;
  int n = 2;
  double grading_exponent = 1.0;

  /// Mesh graded for an integrand behaving like t^(-alpha) near 0.
  static GradedMesh for_singularity(double t_max, int n, double alpha);
  std::vector<double> nodes() const;
};

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point Gauss-Legendre rule. Thread-safe.
const GaussRule& gauss_legendre(int n);

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_subdivisions = 60;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (10/21 point) bisection on [a, b].
/// Throws QuadratureFailure with the best estimate after max_subdivisions.
QuadratureReport<double> integrate_adaptive(const Integrand& f, double a, double b,
                                            const AdaptiveOptions& opts = {});

/// Integral over [a, b] of an integrand with an (a)^(-alpha) type singularity
/// at a. Substitutes s = a + u^(1/(1-alpha)) before adaptive integration.
QuadratureReport<double> adaptive_singular(const Integrand& f, double a, double b, double alpha,
                                           double tol, int max_subdivisions = 60);

enum class GradedEnd { Left, Right, Both };

/// Adaptive integration after the substitution s = a + (b-a) u^p clustered at the
/// given end(s). Used for integrands with algebraic derivative singularities.
QuadratureReport<double> integrate_graded(const Integrand& f, double a, double b, double p,
                                          GradedEnd end, const AdaptiveOptions& opts = {});

/// Exact integral of the piecewise-linear interpolant times e^(-i omega s)
/// over the finite cells of f. Tails are not included.
CVec3 filon_linear(const SampledField& f, double omega);

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> terms);

}  // namespace memheat::quad
