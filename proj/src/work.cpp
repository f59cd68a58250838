#include "memheat/work.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "memheat/errors.hpp"
#include "memheat/flux.hpp"
#include "memheat/parallel.hpp"
#include "memheat/quadrature.hpp"
#include "work_internal.hpp"

namespace memheat {
namespace detail {

std::vector<Cell> cells_of(const SampledField& f) {
  std::vector<Cell> out;
  const auto& grid = f.grid();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (grid[i + 1] > grid[i]) out.push_back({grid[i], grid[i + 1], f.node_value(i), f.node_value(i + 1)});
  }
  return out;
}

double linear_pairing(const SampledField& f, const SampledField& phi) {
  std::vector<double> breaks;
  std::merge(f.grid().begin(), f.grid().end(), phi.grid().begin(), phi.grid().end(),
             std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> terms;
  terms.reserve(breaks.size());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double m = 0.5 * (a + b);
    // Right value at a, left limit at b: exact Simpson for the quadratic product.
    terms.push_back((b - a) / 6.0 *
                    (dot(f.at(a), phi.at(a)) + 4.0 * dot(f.at(m), phi.at(m)) +
                     dot(f.left_limit(b), phi.left_limit(b))));
  }
  return quad::pairwise_sum(terms);
}

}  // namespace detail

namespace {

using detail::Cell;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Monomial coefficients in t of the cubic through (0, q0), (1/3, q1), (2/3, q2), (1, q3).
std::array<double, 4> cubic_coefficients(const std::array<double, 4>& q) {
  const double d1a = 3.0 * (q[1] - q[0]);
  const double d1b = 3.0 * (q[2] - q[1]);
  const double d1c = 3.0 * (q[3] - q[2]);
  const double d2a = 1.5 * (d1b - d1a);
  const double d2b = 1.5 * (d1c - d1b);
  const double d3 = d2b - d2a;
  return {q[0], d1a - d2a / 3.0 + 2.0 * d3 / 9.0, d2a - d3, d3};
}

// Integral of k(v) Q(v) over [v0, v1] (v0 >= 0) for a cubic Q.
template <class F>
double cubic_against_kernel(const RelaxationKernel& kernel, double v0, double v1, F&& q) {
  const double h = v1 - v0;
  if (!(h > 0.0)) return 0.0;
  const std::array<double, 4> samples = {q(v0), q(v0 + h / 3.0), q(v0 + 2.0 * h / 3.0), q(v1)};
  const auto c = cubic_coefficients(samples);
  const auto lm = kernel.local_moments(v0, v1);
  double sum = 0.0;
  double hp = 1.0;
  for (int m = 0; m < 4; ++m) {
    sum += c[m] / hp * lm[m];
    hp *= h;
  }
  return sum;
}

template <class G>
double simpson(double lo, double hi, G&& g) {
  if (!(hi > lo)) return 0.0;
  return (hi - lo) / 6.0 * (g(lo) + 4.0 * g(0.5 * (lo + hi)) + g(hi));
}

// Integral over s in I, tau in J of k(|tau - s|) gI(s) . gJ(tau).
double pair_difference(const RelaxationKernel& kernel, const Cell& ci, const Cell& cj) {
  auto q = [&](double u) {
    const double lo = std::max(ci.a, cj.a - u);
    const double hi = std::min(ci.b, cj.b - u);
    return simpson(lo, hi, [&](double s) { return dot(ci.at(s), cj.at(s + u)); });
  };
  std::array<double, 5> br = {cj.a - ci.b, cj.a - ci.a, cj.b - ci.b, cj.b - ci.a, 0.0};
  std::sort(br.begin(), br.end());
  const double u_lo = cj.a - ci.b, u_hi = cj.b - ci.a;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double u0 = std::max(br[i], u_lo), u1 = std::min(br[i + 1], u_hi);
    if (!(u1 > u0)) continue;
    if (u0 >= 0.0) {
      sum += cubic_against_kernel(kernel, u0, u1, q);
    } else {
      sum += cubic_against_kernel(kernel, -u1, -u0, [&](double v) { return q(-v); });
    }
  }
  return sum;
}

// Integral over s in I, tau in J of k(tau + s) gI(s) . gJ(tau).
double pair_sum(const RelaxationKernel& kernel, const Cell& ci, const Cell& cj) {
  auto q = [&](double u) {
    const double lo = std::max(ci.a, u - cj.b);
    const double hi = std::min(ci.b, u - cj.a);
    return simpson(lo, hi, [&](double s) { return dot(ci.at(s), cj.at(u - s)); });
  };
  std::array<double, 4> br = {ci.a + cj.a, ci.a + cj.b, ci.b + cj.a, ci.b + cj.b};
  std::sort(br.begin(), br.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    sum += cubic_against_kernel(kernel, br[i], br[i + 1], q);
  }
  return sum;
}

// Integral over tau in J of (c . gJ(tau)) tail_mass(S + tau), by parts.
double tail_pair(const RelaxationKernel& kernel, const Vec3& c, double s_last, const Cell& cj) {
  const double h = cj.b - cj.a;
  const double p0 = dot(c, cj.fa);
  const double p1 = (dot(c, cj.fb) - p0) / h;
  const auto lm = kernel.local_moments(s_last + cj.a, s_last + cj.b);
  const double primitive_end = p0 * h + 0.5 * p1 * h * h;
  return primitive_end * kernel.tail_mass(s_last + cj.b) + p0 * lm[1] + 0.5 * p1 * lm[2];
}

// Convolution B(tau) = integral over [0, tau] of k(u) g(tau - u).
Vec3 causal_inner(const RelaxationKernel& kernel, const std::vector<Cell>& cells, double tau) {
  Vec3 acc{0.0, 0.0, 0.0};
  for (const Cell& c : cells) {
    if (c.a >= tau) break;
    const double hi = std::min(c.b, tau);
    const Vec3 f_hi = hi == c.b ? c.fb : c.at(hi);
    const auto lm = kernel.local_moments(tau - hi, tau - c.a);
    const double inv = 1.0 / (hi - c.a);
    for (int k = 0; k < 3; ++k) acc[k] += f_hi[k] * lm[0] + (c.fa[k] - f_hi[k]) * inv * lm[1];
  }
  return acc;
}

// C(s) = integral over u >= 0 of k(u) g(s + u).
Vec3 swapped_inner(const RelaxationKernel& kernel, const std::vector<Cell>& cells, double s) {
  Vec3 acc{0.0, 0.0, 0.0};
  for (const Cell& c : cells) {
    if (c.b <= s) continue;
    const double lo = std::max(c.a, s);
    const Vec3 f_lo = lo == c.a ? c.fa : c.at(lo);
    const auto lm = kernel.local_moments(lo - s, c.b - s);
    const double inv = 1.0 / (c.b - lo);
    for (int k = 0; k < 3; ++k) acc[k] += f_lo[k] * lm[0] + (c.fb[k] - f_lo[k]) * inv * lm[1];
  }
  return acc;
}

double work_scale(const RelaxationKernel& kernel, const SampledField& g, double duration) {
  const double sup = g.sup_norm();
  return kernel.mass() * sup * sup * duration;
}

quad::AdaptiveOptions outer_options(double scale, std::size_t cells, double tol) {
  quad::AdaptiveOptions opts;
  opts.abs_tol = tol * (scale > 0.0 ? scale : 1.0) / static_cast<double>(std::max<std::size_t>(1, cells));
  opts.rel_tol = 0.0;
  opts.max_subdivisions = 400;
  return opts;
}

WorkResult outer_quadrature(const RelaxationKernel& kernel, const Process& p, WorkMethod form) {
  const auto cells = detail::cells_of(p.g());
  const double grading = kernel.singular_at_origin() ? 4.0 : 1.0;
  const auto opts = outer_options(work_scale(kernel, p.g(), p.duration()), cells.size(), 1e-13);
  std::vector<double> values(cells.size()), errors(cells.size());
  parallel_for(cells.size(), [&](std::size_t j) {
    const Cell& cj = cells[j];
    if (cj.zero()) return;
    quad::QuadratureReport<double> r;
    if (form == WorkMethod::CausalDouble) {
      r = quad::integrate_graded(
          [&](double tau) { return dot(causal_inner(kernel, cells, tau), cj.at(tau)); }, cj.a,
          cj.b, grading, quad::GradedEnd::Left, opts);
    } else {
      r = quad::integrate_graded(
          [&](double s) { return dot(cj.at(s), swapped_inner(kernel, cells, s)); }, cj.a, cj.b,
          grading, quad::GradedEnd::Right, opts);
    }
    values[j] = r.value;
    errors[j] = r.abs_error_estimate;
  });
  return {quad::pairwise_sum(values), form, quad::pairwise_sum(errors)};
}

WorkResult symmetrized(const RelaxationKernel& kernel, const Process& p) {
  const auto cells = detail::cells_of(p.g());
  const std::size_t n = cells.size();
  std::vector<double> terms(n * (n + 1) / 2, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const std::size_t base = i * n - i * (i - 1) / 2;
    if (cells[i].zero()) return;
    for (std::size_t j = i; j < n; ++j) {
      if (cells[j].zero()) continue;
      const double v = pair_difference(kernel, cells[i], cells[j]);
      terms[base + (j - i)] = i == j ? 0.5 * v : v;
    }
  });
  double abs_sum = 0.0;
  for (double t : terms) abs_sum += std::fabs(t);
  return {quad::pairwise_sum(terms), WorkMethod::Symmetrized, 256.0 * kEps * abs_sum};
}

void require_finite_flux(const RelaxationKernel& kernel, const SampledField& g_t) {
  if (g_t.is_zero()) return;
  const auto report = gamma_membership(kernel, g_t, {0.0});
  if (!report.member) {
    throw InfiniteFlux("history has no finite flux: " + report.diagnostic, report.worst_change);
  }
}

}  // namespace

std::string to_string(WorkMethod method) {
  switch (method) {
    case WorkMethod::CausalDouble:
      return "causal_double";
    case WorkMethod::Swapped:
      return "swapped";
    case WorkMethod::Symmetrized:
      return "symmetrized";
    case WorkMethod::GeneralState:
      return "general_state";
    case WorkMethod::Spectral:
      return "spectral";
    case WorkMethod::Definition:
      return "definition";
  }
  return "unknown";
}

Vec3 work_I_term(const RelaxationKernel& kernel, const SampledField& g_t, double tau) {
  return -shifted_integral(kernel, g_t, tau).value;
}

Pairing work_I_pairing(const RelaxationKernel& kernel, const SampledField& g_t, const Process& p) {
  if (g_t.is_zero() || p.g().is_zero()) return {};
  const auto hist = detail::cells_of(g_t);
  const auto proc = detail::cells_of(p.g());
  const bool tail = g_t.tail() == Tail::Constant && max_abs(g_t.tail_value()) > 0.0;
  std::vector<double> terms(proc.size() * (hist.size() + 1), 0.0);
  parallel_for(proc.size(), [&](std::size_t j) {
    const Cell& cj = proc[j];
    if (cj.zero()) return;
    double* row = terms.data() + j * (hist.size() + 1);
    for (std::size_t i = 0; i < hist.size(); ++i) {
      if (!hist[i].zero()) row[i] = pair_sum(kernel, hist[i], cj);
    }
    if (tail) row[hist.size()] = tail_pair(kernel, g_t.tail_value(), g_t.last_node(), cj);
  });
  double abs_sum = 0.0;
  for (double t : terms) abs_sum += std::fabs(t);
  if (!std::isfinite(abs_sum)) throw InfiniteFlux("history pairing overflowed", HUGE_VAL);
  return {-quad::pairwise_sum(terms), 256.0 * kEps * abs_sum};
}

WorkResult zero_history_work(const RelaxationKernel& kernel, const Process& p, WorkMethod form) {
  if (p.g().is_zero()) return {0.0, form, 0.0};
  switch (form) {
    case WorkMethod::CausalDouble:
    case WorkMethod::Swapped:
      return outer_quadrature(kernel, p, form);
    case WorkMethod::Symmetrized:
      return symmetrized(kernel, p);
    default:
      throw ValidationError("zero-history work form must be causal_double, swapped or symmetrized");
  }
}

WorkResult thermal_work(const RelaxationKernel& kernel, const SampledField& g_t, const Process& p) {
  require_finite_flux(kernel, g_t);
  const WorkResult sym = zero_history_work(kernel, p, WorkMethod::Symmetrized);
  const Pairing ip = work_I_pairing(kernel, g_t, p);
  return {sym.value - ip.value, WorkMethod::GeneralState, sym.error_estimate + ip.error_estimate};
}

WorkResult thermal_work_definition(const RelaxationKernel& kernel, const SampledField& g_t,
                                   const Process& p, double tol) {
  require_finite_flux(kernel, g_t);
  const auto cells = detail::cells_of(p.g());
  const double grading = kernel.singular_at_origin() ? 4.0 : 1.0;
  const double scale = work_scale(kernel, p.g(), p.duration()) +
                       kernel.mass() * g_t.sup_norm() * p.g().sup_norm() * p.duration();
  const auto opts = outer_options(scale, cells.size(), tol);
  std::vector<double> values(cells.size()), errors(cells.size());
  parallel_for(cells.size(), [&](std::size_t j) {
    const Cell& cj = cells[j];
    if (cj.zero()) return;
    const auto r = quad::integrate_graded(
        [&](double tau) {
          const SampledField g = prolong_translated(g_t, p, tau);
          const Vec3 q = -shifted_integral(kernel, g, 0.0).value;
          return -dot(q, cj.at(tau));
        },
        cj.a, cj.b, grading, quad::GradedEnd::Left, opts);
    values[j] = r.value;
    errors[j] = r.abs_error_estimate;
  });
  return {quad::pairwise_sum(values), WorkMethod::Definition, quad::pairwise_sum(errors)};
}

WorkEquivalenceReport work_equivalence_report(const RelaxationKernel& kernel,
                                              const SampledField& g1, const SampledField& g2,
                                              const std::vector<Process>& probes, double tol) {
  if (!(tol > 0.0)) throw DomainError("work equivalence tolerance must be positive");
  std::vector<double> ratio(probes.size()), diff(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    const double w1 = thermal_work(kernel, g1, probes[i]).value;
    const double w2 = thermal_work(kernel, g2, probes[i]).value;
    diff[i] = std::fabs(w1 - w2);
    ratio[i] = diff[i] / (1.0 + std::fabs(w1));
  });
  WorkEquivalenceReport report;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (ratio[i] > tol) report.equivalent = false;
    if (diff[i] > report.max_difference) {
      report.max_difference = diff[i];
      report.worst_probe = i;
    }
  }
  return report;
}

bool work_equivalence_check(const RelaxationKernel& kernel, const SampledField& g1,
                            const SampledField& g2, const std::vector<Process>& probes,
                            double tol) {
  return work_equivalence_report(kernel, g1, g2, probes, tol).equivalent;
}

std::vector<Process> random_probe_processes(std::uint64_t seed, int count) {
  if (count < 0) throw ValidationError("probe count must be nonnegative");
  constexpr int kKnots = 8;
  constexpr double kLength = 2.0;
  std::mt19937_64 rng(seed);
  // 53 random bits mapped to [0, 1), independent of the standard library's
  // distribution implementations.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Process> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int p = 0; p < count; ++p) {
    std::vector<double> grid(kKnots);
    std::vector<Vec3> values(kKnots);
    for (int k = 0; k < kKnots; ++k) {
      grid[k] = kLength * k / (kKnots - 1);
      for (double& v : values[k]) v = 2.0 * uniform() - 1.0;
    }
    out.push_back(Process::from_gradient(SampledField(grid, values, Tail::Zero), kLength));
  }
  return out;
}

}  // namespace memheat
