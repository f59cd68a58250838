#pragma once

namespace memheat::special {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Unnormalized lower incomplete gamma: integral of t^(a-1) e^(-t) over [0, x].
double lower_gamma(double a, double x);

/// Unnormalized upper incomplete gamma: integral of t^(a-1) e^(-t) over [x, inf).
double upper_gamma(double a, double x);

/// Sine and cosine integrals Si(x), Ci(x) for x > 0.
void sin_cos_integral(double x, double& si, double& ci);

}  // namespace memheat::special
