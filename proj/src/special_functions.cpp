#include "memheat/special_functions.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "memheat/errors.hpp"

namespace memheat::special {
namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

// Series for P(a, x); converges quickly for x < a + 1.
double p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw QuadratureFailure("incomplete gamma series did not converge", sum, std::fabs(term));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw QuadratureFailure("incomplete gamma continued fraction did not converge", h, 1.0);
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("incomplete gamma requires a > 0 and x >= 0");
  }
}

}  // namespace

double gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? p_series(a, x) : 1.0 - q_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - p_series(a, x) : q_continued_fraction(a, x);
}

double lower_gamma(double a, double x) { return std::tgamma(a) * gamma_p(a, x); }

double upper_gamma(double a, double x) { return std::tgamma(a) * gamma_q(a, x); }

void sin_cos_integral(double x, double& si, double& ci) {
  if (!(x > 0.0)) throw DomainError("sine/cosine integrals need x > 0");
  constexpr double kEuler = 0.57721566490153286061;
  constexpr double kHalfPi = 1.57079632679489661923;
  if (x < 1e-8) {
    si = x;
    ci = kEuler + std::log(x);
    return;
  }
  if (x > 2.0) {
    // Continued fraction for E1(i x), modified Lentz.
    std::complex<double> b(1.0, x);
    std::complex<double> c = 1.0 / kTiny;
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 2; i <= kMaxIterations; ++i) {
      const double a = -static_cast<double>((i - 1) * (i - 1));
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const std::complex<double> del = c * d;
      h *= del;
      if (std::fabs(del.real() - 1.0) + std::fabs(del.imag()) < kEps) {
        h *= std::complex<double>(std::cos(x), -std::sin(x));
        ci = -h.real();
        si = kHalfPi + h.imag();
        return;
      }
    }
    throw QuadratureFailure("sine/cosine integral continued fraction did not converge", 0.0, 1.0);
  }
  // Power series, alternating between the sine and cosine parts.
  double sum = 0.0, sums = 0.0, sumc = 0.0;
  double sign = 1.0, fact = 1.0;
  bool odd = true;
  for (int k = 1; k <= kMaxIterations; ++k) {
    fact *= x / k;
    const double term = fact / k;
    sum += sign * term;
    const double err = term / std::fabs(sum);
    if (odd) {
      sign = -sign;
      sums = sum;
      sum = sumc;
    } else {
      sumc = sum;
      sum = sums;
    }
    if (err < kEps) {
      si = sums;
      ci = sumc + std::log(x) + kEuler;
      return;
    }
    odd = !odd;
  }
  throw QuadratureFailure("sine/cosine integral series did not converge", 0.0, 1.0);
}

}  // namespace memheat::special
