#include "memheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "memheat/errors.hpp"
#include "memheat/quadrature.hpp"
#include "memheat/special_functions.hpp"

namespace memheat {
namespace {

constexpr double kHorizonRatio = 1e-10;
constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr double binomial(int m, int j) {
  constexpr double table[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  return table[m][j];
}

// Integrals of u^m A exp(-lambda u) over [0, h], m = 0..3.
std::array<double, 4> exp_local_moments(double amplitude, double lambda, double h) {
  std::array<double, 4> out{};
  const double x = lambda * h;
  double hp = h;
  for (int m = 0; m < 4; ++m) {
    if (x < 1e-8) {
      out[m] = amplitude * hp * (1.0 / (m + 1) - x / (m + 2));
    } else {
      out[m] = amplitude * special::lower_gamma(m + 1.0, x) / std::pow(lambda, m + 1.0);
    }
    hp *= h;
  }
  return out;
}

// Shifts moments about p0 to moments about s0 <= p0 and accumulates them.
void accumulate_shifted(std::array<double, 4>& acc, const std::array<double, 4>& part,
                        double shift) {
  for (int m = 0; m < 4; ++m) {
    double sum = 0.0;
    double sp = 1.0;
    for (int j = m; j >= 0; --j) {
      sum += binomial(m, j) * part[j] * sp;
      sp *= shift;
    }
    acc[m] += sum;
  }
}

// (e^z - 1)/z for complex z, stable near 0.
std::complex<double> expm1_over(std::complex<double> z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  const std::complex<double> em1(std::expm1(x) * std::cos(y) - 2.0 * s * s,
                                 std::exp(x) * std::sin(y));
  return em1 / z;
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Exponential:
      return "exponential";
    case KernelFamily::DampedAbel:
      return "damped_abel";
    case KernelFamily::Tabulated:
      return "tabulated";
  }
  return "unknown";
}

RelaxationKernel RelaxationKernel::exponential(double k0, double tau_r) {
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw ValidationError("exponential kernel needs k0 > 0");
  if (!(tau_r > 0.0) || !std::isfinite(tau_r)) {
    throw ValidationError("exponential kernel needs tau_r > 0");
  }
  RelaxationKernel k;
  k.family_ = KernelFamily::Exponential;
  k.strength_ = k0;
  k.rate_ = 1.0 / tau_r;
  k.finalize();
  return k;
}

RelaxationKernel RelaxationKernel::damped_abel(double c, double alpha, double beta) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("damped Abel kernel needs c > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("damped Abel kernel needs alpha in (0, 1)");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("damped Abel kernel needs beta > 0");
  }
  RelaxationKernel k;
  k.family_ = KernelFamily::DampedAbel;
  k.strength_ = c;
  k.alpha_ = alpha;
  k.rate_ = beta;
  k.finalize();
  return k;
}

RelaxationKernel RelaxationKernel::tabulated(std::vector<double> t, std::vector<double> kv) {
  if (t.size() != kv.size()) throw ValidationError("kernel table columns differ in length");
  if (t.size() < 2) throw ValidationError("kernel table needs at least two samples");
  if (t.front() != 0.0) throw ValidationError("kernel table must start at t = 0");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(kv[i])) {
      throw ValidationError("kernel table contains non-finite entries");
    }
    if (!(kv[i] > 0.0)) throw ValidationError("kernel table values must be positive");
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw ValidationError("kernel table times must be strictly increasing");
    }
    if (i > 0 && kv[i] > kv[i - 1]) throw ValidationError("kernel table must be nonincreasing");
  }
  if (!(kv.back() < kv[kv.size() - 2])) {
    throw ValidationError("kernel table must decrease strictly on its last segment");
  }
  RelaxationKernel k;
  k.family_ = KernelFamily::Tabulated;
  k.table_t_ = std::move(t);
  k.table_k_ = std::move(kv);
  const std::size_t n = k.table_t_.size();
  k.seg_rate_.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    k.seg_rate_[i] = std::log(k.table_k_[i] / k.table_k_[i + 1]) / (k.table_t_[i + 1] - k.table_t_[i]);
  }
  k.seg_rate_[n - 1] = k.seg_rate_[n - 2];
  k.suffix_mass_.resize(n);
  k.suffix_mass_[n - 1] = k.table_k_[n - 1] / k.seg_rate_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    const double h = k.table_t_[i + 1] - k.table_t_[i];
    const double lam = k.seg_rate_[i];
    const double seg = lam * h < 1e-12 ? k.table_k_[i] * h
                                       : -k.table_k_[i] * std::expm1(-lam * h) / lam;
    k.suffix_mass_[i] = seg + k.suffix_mass_[i + 1];
  }
  k.strength_ = k.table_k_.front();
  k.rate_ = k.seg_rate_.back();
  k.finalize();
  return k;
}

void RelaxationKernel::finalize() {
  switch (family_) {
    case KernelFamily::Exponential:
      mass_ = strength_ / rate_;
      break;
    case KernelFamily::DampedAbel:
      mass_ = strength_ * std::tgamma(1.0 - alpha_) * std::pow(rate_, alpha_ - 1.0);
      break;
    case KernelFamily::Tabulated:
      mass_ = suffix_mass_.front();
      break;
  }
  // Positivity and monotone decay on a log-spaced validation grid.
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 120; ++i) {
    const double t = std::pow(10.0, -6.0 + i * 0.075) / rate_;
    const double v = (*this)(t);
    if (!(v >= 0.0) || v > prev * (1.0 + 1e-12)) {
      throw ValidationError("kernel is not positive and nonincreasing");
    }
    prev = v;
  }
  const double target = kHorizonRatio * mass_;
  double hi = 1.0 / rate_;
  while (tail_mass(hi) > target) hi *= 2.0;
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (tail_mass(mid) > target ? lo : hi) = mid;
  }
  horizon_ = hi;
}

std::optional<double> RelaxationKernel::initial_value() const {
  if (singular_at_origin()) return std::nullopt;
  return strength_;
}

std::size_t RelaxationKernel::segment_of(double t) const {
  const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), t);
  return static_cast<std::size_t>(it - table_t_.begin()) - 1;
}

double RelaxationKernel::segment_rate(std::size_t i) const { return seg_rate_[i]; }

double RelaxationKernel::operator()(double t) const {
  if (std::isnan(t) || t < 0.0) throw DomainError("kernel evaluated at negative time");
  switch (family_) {
    case KernelFamily::Exponential:
      return strength_ * std::exp(-rate_ * t);
    case KernelFamily::DampedAbel:
      if (t == 0.0) throw SingularEvaluation("damped Abel kernel is unbounded at t = 0");
      return strength_ * std::pow(t, -alpha_) * std::exp(-rate_ * t);
    case KernelFamily::Tabulated: {
      const std::size_t i = segment_of(t);
      return table_k_[i] * std::exp(-seg_rate_[i] * (t - table_t_[i]));
    }
  }
  return 0.0;
}

double RelaxationKernel::tail_mass(double a) const {
  if (std::isnan(a) || a < 0.0) throw DomainError("tail_mass needs a >= 0");
  if (std::isinf(a)) return 0.0;
  switch (family_) {
    case KernelFamily::Exponential:
      return strength_ / rate_ * std::exp(-rate_ * a);
    case KernelFamily::DampedAbel:
      return strength_ * std::pow(rate_, alpha_ - 1.0) * special::upper_gamma(1.0 - alpha_, rate_ * a);
    case KernelFamily::Tabulated: {
      const std::size_t i = segment_of(a);
      const double ka = (*this)(a);
      const double lam = seg_rate_[i];
      if (i + 1 == table_t_.size()) return ka / lam;
      const double h = table_t_[i + 1] - a;
      const double seg = lam * h < 1e-12 ? ka * h : -ka * std::expm1(-lam * h) / lam;
      return seg + suffix_mass_[i + 1];
    }
  }
  return 0.0;
}

double RelaxationKernel::cosine_transform(double omega) const {
  if (!std::isfinite(omega)) throw DomainError("cosine transform needs a finite frequency");
  const double w = std::fabs(omega);
  switch (family_) {
    case KernelFamily::Exponential: {
      const double tau = 1.0 / rate_;
      return strength_ * tau / (1.0 + w * w * tau * tau);
    }
    case KernelFamily::DampedAbel:
      return strength_ * std::tgamma(1.0 - alpha_) *
             std::pow(rate_ * rate_ + w * w, 0.5 * (alpha_ - 1.0)) *
             std::cos((1.0 - alpha_) * std::atan2(w, rate_));
    case KernelFamily::Tabulated: {
      // Exact transform of the piecewise-exponential interpolant.
      std::complex<double> acc = 0.0;
      const std::size_t n = table_t_.size();
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = table_t_[i + 1] - table_t_[i];
        const std::complex<double> z(-seg_rate_[i], w);
        acc += table_k_[i] * std::polar(1.0, w * table_t_[i]) * h * expm1_over(z * h);
      }
      const std::complex<double> z(-seg_rate_[n - 1], w);
      acc += table_k_[n - 1] * std::polar(1.0, w * table_t_[n - 1]) / (-z);
      return acc.real();
    }
  }
  return 0.0;
}

std::array<double, 4> RelaxationKernel::local_moments(double s0, double s1) const {
  if (!(s0 >= 0.0) || !(s1 >= s0)) throw DomainError("cell moments need 0 <= s0 <= s1");
  std::array<double, 4> out{};
  if (s1 == s0) return out;
  const double h = s1 - s0;
  switch (family_) {
    case KernelFamily::Exponential:
      return exp_local_moments(strength_ * std::exp(-rate_ * s0), rate_, h);
    case KernelFamily::Tabulated: {
      std::size_t i = segment_of(s0);
      double p0 = s0;
      while (p0 < s1) {
        const double p1 = i + 1 < table_t_.size() ? std::min(s1, table_t_[i + 1]) : s1;
        if (p1 > p0) {
          const double amp = table_k_[i] * std::exp(-seg_rate_[i] * (p0 - table_t_[i]));
          accumulate_shifted(out, exp_local_moments(amp, seg_rate_[i], p1 - p0), p0 - s0);
        }
        p0 = p1;
        ++i;
      }
      return out;
    }
    case KernelFamily::DampedAbel:
      break;
  }
  const double c = strength_, a = alpha_, b = rate_;
  if (s0 == 0.0) {
    for (int m = 0; m < 4; ++m) {
      out[m] = c * std::pow(b, a - m - 1.0) * special::lower_gamma(m + 1.0 - a, b * h);
    }
    return out;
  }
  if (s0 < h) {
    // Raw moments from incomplete-gamma differences, then a binomial shift.
    std::array<double, 4> raw{};
    for (int j = 0; j < 4; ++j) {
      const double sj = j + 1.0 - a;
      raw[j] = c * std::pow(b, -sj) *
               (special::lower_gamma(sj, b * s1) - special::lower_gamma(sj, b * s0));
    }
    for (int m = 0; m < 4; ++m) {
      double sum = 0.0;
      double sp = 1.0;
      for (int j = m; j >= 0; --j) {
        sum += binomial(m, j) * raw[j] * sp;
        sp *= -s0;
      }
      out[m] = sum;
    }
    return out;
  }
  // Away from the origin the kernel is analytic on a neighbourhood of the cell;
  // composite Gauss-Legendre on panels no wider than the decay length.
  const auto& rule = quad::gauss_legendre(16);
  const int panels = std::max(1, static_cast<int>(std::ceil(b * h)));
  const double w = h / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = s0 + p * w;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = lo + 0.5 * w * (rule.nodes[q] + 1.0);
      const double u = s - s0;
      const double f = 0.5 * w * rule.weights[q] * c * std::pow(s, -a) * std::exp(-b * s);
      out[0] += f;
      out[1] += f * u;
      out[2] += f * u * u;
      out[3] += f * u * u * u;
    }
  }
  return out;
}

CellMoments RelaxationKernel::cell_moments(double s0, double s1) const {
  const auto lm = local_moments(s0, s1);
  CellMoments cm;
  cm.m0 = lm[0];
  cm.m1_local = lm[1];
  cm.m1 = s0 * lm[0] + lm[1];
  cm.abs_error = 16.0 * kEps * (std::fabs(cm.m0) + std::fabs(cm.m1));
  return cm;
}

double eval_kernel(const RelaxationKernel& kernel, double t) { return kernel(t); }
double tail_mass(const RelaxationKernel& kernel, double a) { return kernel.tail_mass(a); }
double cosine_transform(const RelaxationKernel& kernel, double omega) {
  return kernel.cosine_transform(omega);
}
CellMoments cell_moments(const RelaxationKernel& kernel, double s0, double s1) {
  return kernel.cell_moments(s0, s1);
}

void ConductorParams::validate() const {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw ValidationError("alpha0 must be positive");
  if (!std::isfinite(theta0)) throw ValidationError("theta0 must be finite");
}

}  // namespace memheat
