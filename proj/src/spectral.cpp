#include <algorithm>
#include <cmath>
#include <numbers>

#include "memheat/errors.hpp"
#include "memheat/flux.hpp"
#include "memheat/parallel.hpp"
#include "memheat/quadrature.hpp"
#include "memheat/special_functions.hpp"
#include "memheat/work.hpp"
#include "work_internal.hpp"

namespace memheat {
namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Kronrod 15-point abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Jumps and slope jumps of a compactly supported piecewise-linear field. Its
// transform is exactly sum_j e^(-i w t_j) (J_j / (i w) + S_j / (i w)^2).
struct Breaks {
  std::vector<double> t;
  std::vector<Vec3> jump, slope_jump;
};

Breaks breaks_of(const SampledField& f) {
  Breaks out;
  const auto& grid = f.grid();
  const auto& v = f.values();
  const std::size_t n = grid.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t last = i;
    while (last + 1 < n && grid[last + 1] == grid[i]) ++last;
    const double x = grid[i];
    const Vec3 right = last + 1 < n ? v[last] : Vec3{0.0, 0.0, 0.0};
    const Vec3 left = i > 0 ? v[i] : Vec3{0.0, 0.0, 0.0};
    const Vec3 slope_r =
        last + 1 < n ? (1.0 / (grid[last + 1] - x)) * (v[last + 1] - v[last]) : Vec3{0.0, 0.0, 0.0};
    const Vec3 slope_l = i > 0 ? (1.0 / (x - grid[i - 1])) * (v[i] - v[i - 1]) : Vec3{0.0, 0.0, 0.0};
    out.t.push_back(x);
    out.jump.push_back(right - left);
    out.slope_jump.push_back(slope_r - slope_l);
    i = last + 1;
  }
  return out;
}

void require_bounded_support(const SampledField& f) {
  if (f.tail() == Tail::Constant && max_abs(f.tail_value()) > 0.0) {
    throw DivergentTransform("field with a nonzero constant tail has no finite spectral norm",
                             HUGE_VAL);
  }
}

SampledField without_tail(const SampledField& f) {
  if (f.tail() == Tail::Zero) return f;
  return SampledField(f.grid(), f.values(), Tail::Zero, f.dim());
}

struct Grid {
  double w_max;
  int panels;
};

Grid frequency_grid(const SpectralOptions& opts, double span) {
  if (opts.n_omega < 15) throw ValidationError("n_omega must be at least 15");
  const int panels = std::max(1, opts.n_omega / 15);
  if (opts.omega_max > 0.0) return {opts.omega_max, panels};
  if (!(span > 0.0)) span = 1.0;
  return {panels * kPi / span, panels};
}

// Integrals of e^(-i omega d) omega^(-p) over [W, inf) for p = 2, 3, 4.
std::array<std::complex<double>, 3> oscillatory_tails(double d, double W) {
  if (d == 0.0) return {1.0 / W, 1.0 / (2.0 * W * W), 1.0 / (3.0 * W * W * W)};
  const double x = std::fabs(d) * W;
  double si, ci;
  special::sin_cos_integral(x, si, ci);
  const double ad = std::fabs(d);
  const std::complex<double> e = std::polar(1.0, -x);
  const std::complex<double> i1(-ci, si - 0.5 * kPi);
  const std::complex<double> I(0.0, 1.0);
  const std::complex<double> i2 = e / W - I * ad * i1;
  const std::complex<double> i3 = e / (2.0 * W * W) - I * ad * i2 / 2.0;
  const std::complex<double> i4 = e / (3.0 * W * W * W) - I * ad * i3 / 3.0;
  if (d > 0.0) return {i2, i3, i4};
  return {std::conj(i2), std::conj(i3), std::conj(i4)};
}

// Integral of w(omega) Re(f_+ . conj(phi_+)) over [0, inf), with w = k_c when a
// kernel is given and w = 1 otherwise.
SpectralValue half_line(const RelaxationKernel* kernel, const SampledField& f,
                        const SampledField& phi, const Grid& grid) {
  const bool same = &f == &phi;
  auto weight = [&](double w) { return kernel ? kernel->cosine_transform(w) : 1.0; };
  auto integrand = [&](double w) {
    const CVec3 a = quad::filon_linear(f, w);
    const CVec3 b = same ? a : quad::filon_linear(phi, w);
    double re = 0.0;
    for (int c = 0; c < 3; ++c) re += (a[c] * std::conj(b[c])).real();
    return weight(w) * re;
  };
  const double width = grid.w_max / grid.panels;
  std::vector<double> values(grid.panels), errors(grid.panels);
  parallel_for(static_cast<std::size_t>(grid.panels), [&](std::size_t p) {
    const double c = (static_cast<double>(p) + 0.5) * width;
    const double h = 0.5 * width;
    const double fc = integrand(c);
    double kron = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
      const double fs = integrand(c - h * kXgk[j]) + integrand(c + h * kXgk[j]);
      kron += kWgk[j] * fs;
      if (j % 2 == 1) gauss += kWg[j / 2] * fs;
    }
    values[p] = kron * h;
    errors[p] = std::fabs(kron - gauss) * h;
  });
  SpectralValue out{quad::pairwise_sum(values), quad::pairwise_sum(errors)};

  // Frequencies beyond w_max. With unit weight the remainder is summed exactly
  // from the break representation of both transforms. With the k_c weight the
  // coincident-break terms are non-oscillatory and added exactly; the rest is
  // bounded and goes into the estimate.
  const double W = grid.w_max;
  const Breaks bf = breaks_of(f);
  const Breaks bp = same ? bf : breaks_of(phi);
  if (!kernel) {
    std::vector<double> terms;
    terms.reserve(bf.t.size() * bp.t.size());
    double magnitude = 0.0;
    for (std::size_t j = 0; j < bf.t.size(); ++j) {
      for (std::size_t k = 0; k < bp.t.size(); ++k) {
        const double jj = dot(bf.jump[j], bp.jump[k]);
        const double js = dot(bf.jump[j], bp.slope_jump[k]) - dot(bf.slope_jump[j], bp.jump[k]);
        const double ss = dot(bf.slope_jump[j], bp.slope_jump[k]);
        if (jj == 0.0 && js == 0.0 && ss == 0.0) continue;
        const auto t = oscillatory_tails(bf.t[j] - bp.t[k], W);
        const double term = (jj * t[0] + std::complex<double>(0.0, js) * t[1] + ss * t[2]).real();
        terms.push_back(term);
        magnitude += std::fabs(term);
      }
    }
    out.value += quad::pairwise_sum(terms);
    out.error_estimate += 1e-13 * magnitude;
    return out;
  }
  double tail2, tail4;  // integrals of w / omega^2 and w / omega^4 over [W, inf)
  {
    quad::AdaptiveOptions o{1e-16, 1e-12, 200};
    const double i2 = quad::integrate_adaptive(
        [&](double v) { return v > 0.0 ? kernel->cosine_transform(W / v) : 0.0; }, 0.0, 1.0, o).value;
    const double i4 = quad::integrate_adaptive(
        [&](double v) { return v > 0.0 ? kernel->cosine_transform(W / v) * v * v : 0.0; }, 0.0,
        1.0, o).value;
    tail2 = i2 / W;
    tail4 = i4 / (W * W * W);
  }
  double coincident = 0.0;
  double oscillating = 0.0;
  double sum_jf = 0.0, sum_sf = 0.0, sum_jp = 0.0, sum_sp = 0.0;
  for (std::size_t j = 0; j < bf.t.size(); ++j) {
    sum_jf += norm(bf.jump[j]);
    sum_sf += norm(bf.slope_jump[j]);
  }
  for (std::size_t k = 0; k < bp.t.size(); ++k) {
    sum_jp += norm(bp.jump[k]);
    sum_sp += norm(bp.slope_jump[k]);
  }
  const double wW = weight(W);
  for (std::size_t j = 0; j < bf.t.size(); ++j) {
    const double jf = norm(bf.jump[j]);
    for (std::size_t k = 0; k < bp.t.size(); ++k) {
      if (bf.t[j] == bp.t[k]) {
        coincident += dot(bf.jump[j], bp.jump[k]) * tail2 +
                      dot(bf.slope_jump[j], bp.slope_jump[k]) * tail4;
      } else if (jf > 0.0) {
        oscillating += jf * norm(bp.jump[k]) * 2.0 * wW / (W * W * std::fabs(bf.t[j] - bp.t[k]));
      }
    }
  }
  oscillating += (sum_jf * sum_sp + sum_sf * sum_jp) * wW / (2.0 * W * W) +
                 sum_sf * sum_sp * wW / (3.0 * W * W * W);
  out.value += coincident;
  out.error_estimate += oscillating;
  return out;
}

// I-term sampled on a mesh over the process support, graded toward 0 for
// singular kernels and containing every process node.
SampledField sampled_I_term(const RelaxationKernel& kernel, const SampledField& g_t,
                            const SampledField& g_p, int n, int stride) {
  const double span = g_p.last_node();
  const double grading =
      kernel.singular_at_origin() ? std::min(8.0, 2.0 / (1.0 - kernel.singularity_exponent())) : 1.0;
  std::vector<double> nodes;
  for (int j = 0; j <= n; j += stride) nodes.push_back(span * std::pow(static_cast<double>(j) / n, grading));
  nodes.back() = span;
  nodes.insert(nodes.end(), g_p.grid().begin(), g_p.grid().end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<Vec3> values(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { values[i] = work_I_term(kernel, g_t, nodes[i]); });
  return SampledField(std::move(nodes), std::move(values), Tail::Zero);
}

constexpr int kISamples = 512;

struct IPairing {
  SpectralValue spectral;  // integral over the real line divided by 2 pi
  double interpolation = 0.0;
};

IPairing spectral_I_pairing(const RelaxationKernel& kernel, const SampledField& g_t,
                            const SampledField& g_p, const Grid& grid) {
  const SampledField fine = sampled_I_term(kernel, g_t, g_p, kISamples, 1);
  const SampledField coarse = sampled_I_term(kernel, g_t, g_p, kISamples, 2);
  const SpectralValue h = half_line(nullptr, fine, g_p, grid);
  IPairing out;
  out.spectral = {h.value / kPi, h.error_estimate / kPi};
  out.interpolation =
      std::fabs(detail::linear_pairing(fine, g_p) - detail::linear_pairing(coarse, g_p));
  return out;
}

}  // namespace

SpectralDensity fourier_plus(const SampledField& f, const std::vector<double>& omega_grid) {
  SpectralDensity out;
  out.omega = omega_grid;
  out.values.resize(omega_grid.size());
  const Vec3 c = f.tail_value();
  const bool tail = max_abs(c) > 0.0;
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    const double w = omega_grid[i];
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("frequencies must be finite and >= 0");
    if (i > 0 && !(w > omega_grid[i - 1])) throw DomainError("frequency grid must increase");
    CVec3 v = quad::filon_linear(f, w);
    if (tail) {
      if (w == 0.0) {
        throw DivergentTransform("transform of a nonzero constant tail diverges at omega = 0",
                                 HUGE_VAL);
      }
      const std::complex<double> e = std::polar(1.0, -w * f.last_node()) / std::complex<double>(0.0, w);
      for (int k = 0; k < 3; ++k) v[k] += c[k] * e;
    }
    out.values[i] = v;
  }
  return out;
}

WorkResult spectral_work(const RelaxationKernel& kernel, const SampledField& g_t, const Process& p,
                         const SpectralOptions& opts) {
  const SampledField& g_p = p.g();
  if (g_p.is_zero()) return {0.0, WorkMethod::Spectral, 0.0};
  const Grid grid = frequency_grid(opts, g_p.last_node());
  const SpectralValue kc = half_line(&kernel, g_p, g_p, grid);
  double value = kc.value / kPi;
  double error = kc.error_estimate / kPi;
  if (!g_t.is_zero()) {
    const auto membership = gamma_membership(kernel, g_t, {0.0});
    if (!membership.member) {
      throw InfiniteFlux("history has no finite flux: " + membership.diagnostic,
                         membership.worst_change);
    }
    const IPairing ip = spectral_I_pairing(kernel, g_t, g_p, grid);
    value -= ip.spectral.value;
    error += ip.spectral.error_estimate + ip.interpolation;
  }
  if (!std::isfinite(value)) throw DivergentTransform("spectral work is not finite", HUGE_VAL);
  return {value, WorkMethod::Spectral, error};
}

SpectralValue inner_product_k(const RelaxationKernel& kernel, const SampledField& f,
                              const SampledField& phi, const SpectralOptions& opts) {
  require_bounded_support(f);
  require_bounded_support(phi);
  if (f.is_zero() || phi.is_zero()) return {};
  const SampledField ff = without_tail(f);
  const SampledField pp = &f == &phi ? ff : without_tail(phi);
  const Grid grid = frequency_grid(opts, std::max(f.last_node(), phi.last_node()));
  const SpectralValue h = half_line(&kernel, ff, &f == &phi ? ff : pp, grid);
  return {2.0 * h.value, 2.0 * h.error_estimate};
}

SpectralValue norm_k(const RelaxationKernel& kernel, const SampledField& phi,
                     const SpectralOptions& opts) {
  return inner_product_k(kernel, phi, phi, opts);
}

bool in_finite_work_space(const RelaxationKernel& kernel, const SampledField& phi,
                          const SpectralOptions& opts) {
  try {
    const SpectralValue a = norm_k(kernel, phi, opts);
    SpectralOptions doubled = opts;
    doubled.n_omega *= 2;
    if (doubled.omega_max > 0.0) doubled.omega_max *= 2.0;
    const SpectralValue b = norm_k(kernel, phi, doubled);
    if (!std::isfinite(a.value) || !std::isfinite(b.value)) return false;
    return std::fabs(a.value - b.value) <=
           1e-6 * std::fabs(b.value) + a.error_estimate + b.error_estimate;
  } catch (const DivergentTransform&) {
    return false;
  }
}

AdmissibilityReport admissibility_check(const RelaxationKernel& kernel, const SampledField& g_t,
                                        const std::vector<Process>& probes,
                                        const SpectralOptions& opts) {
  if (probes.empty()) throw ValidationError("admissibility check needs at least one probe");
  AdmissibilityReport report;
  if (g_t.is_zero()) {
    report.diagnostic = "zero history";
    return report;
  }
  const auto membership = gamma_membership(kernel, g_t, default_tau_grid(kernel));
  if (!membership.member) {
    report.admissible = false;
    report.worst_change = membership.worst_change;
    report.diagnostic = "history fails the finite-flux test: " + membership.diagnostic;
    return report;
  }
  std::vector<double> value(probes.size()), change(probes.size());
  std::vector<char> ok(probes.size(), 1);
  parallel_for(probes.size(), [&](std::size_t i) {
    const SampledField& g_p = probes[i].g();
    if (g_p.is_zero()) return;
    const Grid grid = frequency_grid(opts, g_p.last_node());
    const Grid doubled{2.0 * grid.w_max, 2 * grid.panels};
    const IPairing a = spectral_I_pairing(kernel, g_t, g_p, grid);
    const IPairing b = spectral_I_pairing(kernel, g_t, g_p, doubled);
    value[i] = b.spectral.value;
    change[i] = std::fabs(a.spectral.value - b.spectral.value);
    ok[i] = std::isfinite(a.spectral.value) && std::isfinite(b.spectral.value) &&
            change[i] <= 1e-6 * (1.0 + std::fabs(b.spectral.value)) +
                             a.spectral.error_estimate + b.spectral.error_estimate;
  });
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!ok[i]) report.admissible = false;
    if (change[i] >= report.worst_change || !ok[i]) {
      report.worst_change = change[i];
      report.worst_probe = i;
      report.worst_value = value[i];
    }
  }
  report.diagnostic = report.admissible ? "pairing converged for every probe"
                                        : "pairing did not converge under frequency doubling";
  return report;
}

}  // namespace memheat
