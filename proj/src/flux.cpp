#include "memheat/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "memheat/errors.hpp"
#include "memheat/parallel.hpp"

namespace memheat {
namespace {

constexpr double kMembershipRel = 1e-8;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Partial {
  Vec3 value{0.0, 0.0, 0.0};
  Vec3 absolute{0.0, 0.0, 0.0};
};

// Integral of k(s + tau) g(s) over [0, horizon]; horizon may be infinite.
Partial shifted_partial(const RelaxationKernel& kernel, const SampledField& g, double tau,
                        double horizon) {
  Partial out;
  const auto& grid = g.grid();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    if (a >= horizon) break;
    const double h = grid[i + 1] - a;
    if (h == 0.0) continue;
    const double b = std::min(grid[i + 1], horizon);
    const Vec3& f_lo = g.node_value(i);
    const Vec3& f_hi = g.node_value(i + 1);
    const auto lm = kernel.local_moments(a + tau, b + tau);
    for (int c = 0; c < 3; ++c) {
      const double slope = (f_hi[c] - f_lo[c]) / h;
      out.value[c] += f_lo[c] * lm[0] + slope * lm[1];
      out.absolute[c] += std::fabs(f_lo[c]) * lm[0] + std::fabs(slope) * lm[1];
    }
  }
  const double last = g.last_node();
  if (g.tail() == Tail::Constant && horizon > last) {
    const double m = kernel.tail_mass(last + tau) -
                     (std::isinf(horizon) ? 0.0 : kernel.tail_mass(horizon + tau));
    const Vec3 c = g.tail_value();
    for (int j = 0; j < 3; ++j) {
      out.value[j] += c[j] * m;
      out.absolute[j] += std::fabs(c[j]) * m;
    }
  }
  return out;
}

bool finite(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

struct TauCheck {
  bool ok = true;
  Vec3 value{0.0, 0.0, 0.0};
  double change = 0.0;
};

TauCheck check_shift(const RelaxationKernel& kernel, const SampledField& g, double tau) {
  const double t_inf = kernel.truncation_horizon();
  const double last = g.last_node();
  double prev_h = t_inf;
  double h = 2.0 * t_inf;
  while (h < last && std::isfinite(h)) {
    prev_h = h;
    h *= 2.0;
  }
  const Partial before = shifted_partial(kernel, g, tau, prev_h);
  const Partial after = shifted_partial(kernel, g, tau, h);
  TauCheck out;
  out.value = after.value;
  if (!finite(after.value) || !finite(after.absolute) || !finite(before.value)) {
    out.ok = false;
    out.change = std::numeric_limits<double>::infinity();
    return out;
  }
  const double scale = std::max(max_abs(after.value), max_abs(after.absolute));
  const double change = max_abs(after.value - before.value);
  out.change = scale > 0.0 ? change / scale : 0.0;
  out.ok = change <= kMembershipRel * scale + 1e-300;
  return out;
}

}  // namespace

ShiftedIntegral shifted_integral_truncated(const RelaxationKernel& kernel, const SampledField& g,
                                           double tau, double horizon) {
  if (!(tau >= 0.0)) throw DomainError("shift must be nonnegative");
  const Partial p = shifted_partial(kernel, g, tau, horizon);
  if (!finite(p.value)) throw InfiniteFlux("shifted kernel integral overflowed", HUGE_VAL);
  return {p.value, 64.0 * kEps * max_abs(p.absolute)};
}

ShiftedIntegral shifted_integral(const RelaxationKernel& kernel, const SampledField& g, double tau) {
  return shifted_integral_truncated(kernel, g, tau, std::numeric_limits<double>::infinity());
}

MembershipReport gamma_membership(const RelaxationKernel& kernel, const SampledField& g,
                                  const std::vector<double>& tau_grid) {
  MembershipReport report;
  if (tau_grid.empty()) {
    report.member = false;
    report.diagnostic = "empty shift grid";
    return report;
  }
  if (g.is_zero()) return report;
  std::vector<TauCheck> checks(tau_grid.size());
  parallel_for(tau_grid.size(), [&](std::size_t i) {
    if (!(tau_grid[i] >= 0.0)) throw DomainError("shift grid must be nonnegative");
    checks[i] = check_shift(kernel, g, tau_grid[i]);
  });
  std::size_t worst = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (!checks[i].ok) report.member = false;
    const bool worse = checks[i].ok == checks[worst].ok ? checks[i].change > checks[worst].change
                                                        : !checks[i].ok;
    if (worse) worst = i;
  }
  report.worst_tau = tau_grid[worst];
  report.worst_value = checks[worst].value;
  report.worst_change = checks[worst].change;
  std::ostringstream msg;
  msg << (report.member ? "converged" : "horizon doubling did not converge") << " at tau = "
      << report.worst_tau << ", relative change " << report.worst_change;
  report.diagnostic = msg.str();
  return report;
}

ThermodynamicState make_state(const RelaxationKernel& kernel, double theta, SampledField g) {
  const auto report = gamma_membership(kernel, g, default_tau_grid(kernel));
  if (!report.member) throw InfiniteFlux("history has no finite flux: " + report.diagnostic,
                                         report.worst_change);
  return {theta, std::move(g)};
}

FluxResult heat_flux(const RelaxationKernel& kernel, const SampledField& g) {
  FluxResult out;
  out.truncation_point = std::max(g.last_node(), kernel.truncation_horizon());
  if (g.is_zero()) return out;
  const TauCheck check = check_shift(kernel, g, 0.0);
  if (!check.ok) {
    throw InfiniteFlux("history has no finite flux (relative change " +
                           std::to_string(check.change) + " under horizon doubling)",
                       check.change);
  }
  const ShiftedIntegral r = shifted_integral(kernel, g, 0.0);
  out.q = -r.value;
  out.quadrature_error = r.abs_error;
  return out;
}

FluxResult heat_flux_after(const RelaxationKernel& kernel, const SampledField& g, const Process& p,
                           double t_prolong) {
  return heat_flux(kernel, prolong_translated(g, p, t_prolong));
}

double fading_memory_horizon(const RelaxationKernel& kernel, const SampledField& g,
                             double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("fading-memory epsilon must be positive");
  if (g.is_zero()) return 0.0;
  const TauCheck check = check_shift(kernel, g, 0.0);
  if (!check.ok) throw InfiniteFlux("history has no finite flux", check.change);
  auto magnitude = [&](double a) { return norm(shifted_integral(kernel, g, a).value); };
  auto below = [&](double a) {
    return magnitude(a) < epsilon && magnitude(2.0 * a) < epsilon && magnitude(4.0 * a) < epsilon;
  };
  if (below(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 2.0 * kernel.truncation_horizon();
  if (!below(hi)) {
    throw NotAttained("fading-memory bound not reached within twice the kernel horizon",
                      magnitude(hi));
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> default_tau_grid(const RelaxationKernel& kernel) {
  const double t_inf = kernel.truncation_horizon();
  std::vector<double> grid{0.0};
  for (int i = 0; i < 40; ++i) grid.push_back(t_inf * std::pow(10.0, -4.0 + 4.0 * i / 39.0));
  grid.back() = t_inf;
  return grid;
}

std::vector<Vec3> equivalence_residual(const RelaxationKernel& kernel, const SampledField& g_diff,
                                       const std::vector<double>& tau_grid) {
  std::vector<Vec3> out(tau_grid.size());
  parallel_for(tau_grid.size(),
               [&](std::size_t i) { out[i] = shifted_integral(kernel, g_diff, tau_grid[i]).value; });
  return out;
}

EquivalenceReport equivalence_report(const RelaxationKernel& kernel, const SampledField& g1,
                                     const SampledField& g2, double tol,
                                     const std::vector<double>& tau_grid) {
  if (!(tol > 0.0)) throw DomainError("equivalence tolerance must be positive");
  const std::vector<double> taus = tau_grid.empty() ? default_tau_grid(kernel) : tau_grid;
  const SampledField diff = g1 - g2;
  const auto residual = equivalence_residual(kernel, diff, taus);
  EquivalenceReport report;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double r = norm(residual[i]);
    if (r > report.max_residual) {
      report.max_residual = r;
      report.worst_tau = taus[i];
    }
  }
  report.threshold = tol * (1.0 + norm(heat_flux(kernel, g1).q));
  report.equivalent = report.max_residual <= report.threshold;
  return report;
}

bool histories_equivalent(const RelaxationKernel& kernel, const SampledField& g1,
                          const SampledField& g2, double tol) {
  return equivalence_report(kernel, g1, g2, tol).equivalent;
}

}  // namespace memheat
