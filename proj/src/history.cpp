#include "memheat/history.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "memheat/errors.hpp"
#include "memheat/log.hpp"

namespace memheat {
namespace {

constexpr double kSpliceTol = 1e-12;

// Nodes of f restricted to [0, tau]: (0, f(0)), interior nodes, (tau, f(tau-)).
void restricted_nodes(const SampledField& f, double tau, std::vector<double>& grid,
                      std::vector<Vec3>& values) {
  append_node(grid, values, 0.0, f.at(0.0));
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double s = f.grid()[i];
    if (s >= tau) break;
    append_node(grid, values, s, f.node_value(i));
  }
  if (tau > 0.0) append_node(grid, values, tau, f.left_limit(tau));
}

void check_tau(const Process& p, double tau) {
  if (!(tau > 0.0)) throw DomainError("prolongation time must be positive");
  if (tau > p.duration()) throw DomainError("prolongation time exceeds the process duration");
}

}  // namespace

Process::Process(double duration, SampledField theta_dot, SampledField g)
    : duration_(duration), theta_dot_(std::move(theta_dot)), g_(std::move(g)) {
  if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
    throw ValidationError("process duration must be positive and finite");
  }
  if (theta_dot_.dim() != 1) throw ValidationError("process temperature rate must be scalar");
  if (g_.tail() != Tail::Zero && !g_.is_zero()) {
    throw ValidationError("process gradient must have a Zero tail");
  }
  if (g_.last_node() > duration_ || theta_dot_.last_node() > duration_) {
    throw ValidationError("process samples extend past its duration");
  }
  if (theta_dot_.tail() != Tail::Zero && !theta_dot_.is_zero()) {
    throw ValidationError("process temperature rate must have a Zero tail");
  }
}

Process Process::from_gradient(SampledField g, double duration) {
  const double T = duration < 0.0 ? g.last_node() : duration;
  return Process(T, SampledField::zero(1), std::move(g));
}

Process concatenate(const Process& p1, const Process& p2) {
  const double t1 = p1.duration();
  const double total = t1 + p2.duration();
  auto join = [t1, total](const SampledField& a, const SampledField& b, int dim) {
    std::vector<double> grid;
    std::vector<Vec3> values;
    restricted_nodes(a, t1, grid, values);
    for (std::size_t i = 0; i < b.size(); ++i) {
      append_node(grid, values, std::min(t1 + b.grid()[i], total), b.node_value(i));
    }
    return SampledField(std::move(grid), std::move(values), Tail::Zero, dim);
  };
  return Process(total, join(p1.theta_dot(), p2.theta_dot(), 1),
                 join(p1.g(), p2.g(), std::max(p1.g().dim(), p2.g().dim())));
}

Vec3 IntegratedHistory::at(double s) const {
  const double last = gbar.last_node();
  if (s <= last) return gbar.at(s);
  return gbar.values().back() + (s - last) * tail_slope;
}

ThermodynamicState state_from_process(const ThermodynamicState& initial, const Process& p,
                                      double t) {
  if (!(t >= 0.0)) throw DomainError("state time must be nonnegative");
  if (t >= p.duration()) throw DomainError("state time must be below the process duration");
  if (t == 0.0) return initial;
  ThermodynamicState out;
  out.theta = initial.theta + integrate(p.theta_dot(), 0.0, t)[0];
  out.g_translated = prolong_translated(initial.g_translated, p, t);
  return out;
}

IntegratedHistory integrated_from_translated(const SampledField& g) {
  std::vector<double> grid{0.0};
  std::vector<Vec3> values{Vec3{0.0, 0.0, 0.0}};
  Vec3 acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = g.grid()[i + 1] - g.grid()[i];
    if (h == 0.0) continue;
    acc += (0.5 * h) * (g.node_value(i) + g.node_value(i + 1));
    grid.push_back(g.grid()[i + 1]);
    values.push_back(acc);
  }
  IntegratedHistory out;
  out.gbar = SampledField(std::move(grid), std::move(values), Tail::Constant, g.dim());
  out.tail_slope = g.tail_value();
  return out;
}

SampledField prolong_translated(const SampledField& g_hist, const Process& p, double tau) {
  check_tau(p, tau);
  std::vector<double> pg;
  std::vector<Vec3> pv;
  restricted_nodes(p.g(), tau, pg, pv);

  std::vector<double> grid;
  std::vector<Vec3> values;
  grid.reserve(pg.size() + g_hist.size() + 1);
  values.reserve(grid.capacity());
  for (std::size_t i = pg.size(); i-- > 0;) append_node(grid, values, tau - pg[i], pv[i]);
  const Vec3 left = values.back();
  const Vec3 right = g_hist.at(0.0);
  if (max_abs(left - right) > kSpliceTol * (1.0 + max_abs(right))) {
    std::ostringstream msg;
    msg << "prolongation splice at s = " << tau << " is discontinuous (jump "
        << max_abs(left - right) << ")";
    log::info(msg.str());
  }
  for (std::size_t i = 0; i < g_hist.size(); ++i) {
    append_node(grid, values, tau + g_hist.grid()[i], g_hist.node_value(i));
  }
  return SampledField(std::move(grid), std::move(values), g_hist.tail(),
                      std::max(g_hist.dim(), p.g().dim()));
}

IntegratedHistory prolong_integrated(const IntegratedHistory& gbar_hist, const Process& p,
                                     double tau) {
  check_tau(p, tau);
  std::vector<double> pg;
  std::vector<Vec3> pv;
  restricted_nodes(p.g(), tau, pg, pv);
  // Cumulative integral G(xi) of g_P at the restricted nodes.
  std::vector<Vec3> cum(pg.size(), Vec3{0.0, 0.0, 0.0});
  for (std::size_t i = 1; i < pg.size(); ++i) {
    cum[i] = cum[i - 1] + (0.5 * (pg[i] - pg[i - 1])) * (pv[i - 1] + pv[i]);
  }
  const Vec3 total = cum.back();

  std::vector<double> grid;
  std::vector<Vec3> values;
  for (std::size_t i = pg.size(); i-- > 0;) append_node(grid, values, tau - pg[i], total - cum[i]);
  const auto& hist = gbar_hist.gbar;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    append_node(grid, values, tau + hist.grid()[i], total + hist.node_value(i));
  }
  IntegratedHistory out;
  out.gbar = SampledField(std::move(grid), std::move(values), Tail::Constant,
                          std::max(hist.dim(), p.g().dim()));
  out.tail_slope = gbar_hist.tail_slope;
  return out;
}

}  // namespace memheat
