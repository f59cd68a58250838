#include "memheat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "memheat/errors.hpp"
#include "memheat/flux.hpp"
#include "memheat/log.hpp"

namespace memheat {
namespace {

constexpr double kAmplificationTol = 1e-6;
constexpr int kPrecheckSteps = 4096;

double eval_or_zero(const std::function<double(double)>& f, double t) { return f ? f(t) : 0.0; }

// Solves (1 + 2 mu) v_i - mu (v_{i-1} + v_{i+1}) = rhs_i for i = 1..n-1 with
// v_0, v_n given (already folded into rhs). Constant-coefficient Thomas sweep.
void solve_tridiagonal(double mu, std::vector<double>& rhs, std::vector<double>& scratch) {
  const std::size_t m = rhs.size();
  if (m == 0) return;
  scratch.resize(m);
  const double diag = 1.0 + 2.0 * mu;
  double denom = diag;
  scratch[0] = -mu / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < m; ++i) {
    denom = diag + mu * scratch[i - 1];
    scratch[i] = -mu / denom;
    rhs[i] = (rhs[i] + mu * rhs[i - 1]) / denom;
  }
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

// History inflow H_f(t) = integral over s >= 0 of k(t + s) g_f(s) for every face.
class Inflow {
 public:
  explicit Inflow(const EvolutionProblem& p) : kernel_(p.kernel), hist_(p.initial_history) {
    flat_.resize(hist_.size());
    for (std::size_t f = 0; f < hist_.size(); ++f) {
      flat_[f] = hist_[f].size() == 1 && hist_[f].tail() == Tail::Constant;
    }
  }
  bool empty() const { return hist_.empty(); }
  // Returns the largest quadrature error estimate.
  double operator()(double t, std::vector<double>& out) const {
    if (hist_.empty()) {
      std::fill(out.begin(), out.end(), 0.0);
      return 0.0;
    }
    const double steady = kernel_.tail_mass(t);
    double err = 0.0;
    for (std::size_t f = 0; f < hist_.size(); ++f) {
      if (flat_[f]) {
        out[f] = hist_[f].tail_value()[0] * steady;
      } else {
        const auto r = shifted_integral(kernel_, hist_[f], t);
        out[f] = r.value[0];
        err = std::max(err, r.abs_error);
      }
    }
    return err;
  }

 private:
  const RelaxationKernel& kernel_;
  const std::vector<SampledField>& hist_;
  std::vector<char> flat_;
};

double precheck_amplification(const RelaxationKernel& kernel, double dt, double dx, double length,
                              int steps) {
  const auto w = convolution_weights(kernel, dt, std::min(steps, kPrecheckSteps));
  const double lambda_max = 4.0 / (dx * dx);
  const double s = 2.0 / dx * std::sin(std::numbers::pi * dx / (2.0 * length));
  const double lambda_min = s * s;
  double amp = 0.0;
  for (double lambda : {lambda_min, std::sqrt(lambda_min * lambda_max), lambda_max}) {
    amp = std::max(amp, estimate_amplification(w, lambda * dt));
  }
  return amp;
}

std::vector<double> node_positions(double length, int nx) {
  std::vector<double> x(nx + 1);
  for (int i = 0; i <= nx; ++i) x[i] = length * i / nx;
  x[nx] = length;
  return x;
}

std::vector<double> face_positions(double length, int nx) {
  std::vector<double> x(nx);
  for (int i = 0; i < nx; ++i) x[i] = length * (i + 0.5) / nx;
  return x;
}

bool stored(int n, int steps, int stride) { return n % stride == 0 || n == steps; }

}  // namespace

int EvolutionProblem::steps() const {
  return static_cast<int>(std::llround(t_end / dt));
}

void EvolutionProblem::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("domain length must be positive");
  if (nx < 3) throw ValidationError("nx must be at least 3");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be positive");
  if (std::fabs(steps() * dt - t_end) > 1e-9 * t_end) {
    throw ValidationError("t_end must be an integer multiple of dt");
  }
  if (snapshot_stride < 1) throw ValidationError("snapshot stride must be positive");
  if (initial_u.size() != static_cast<std::size_t>(nx) + 1) {
    throw ValidationError("initial_u must have nx + 1 values");
  }
  for (double v : initial_u) {
    if (!std::isfinite(v)) throw ValidationError("initial_u contains a non-finite value");
  }
  const double l0 = eval_or_zero(left, 0.0), r0 = eval_or_zero(right, 0.0);
  if (std::fabs(l0 - initial_u.front()) > 1e-12 * (1.0 + std::fabs(l0)) ||
      std::fabs(r0 - initial_u.back()) > 1e-12 * (1.0 + std::fabs(r0))) {
    throw ValidationError("boundary data at t = 0 must match initial_u");
  }
  if (!initial_history.empty()) {
    if (initial_history.size() != static_cast<std::size_t>(nx)) {
      throw ValidationError("initial history needs one field per face");
    }
    const double h = length / nx;
    for (int f = 0; f < nx; ++f) {
      const SampledField& g = initial_history[f];
      if (g.dim() != 1) throw ValidationError("face histories must be scalar");
      if (g.tail() == Tail::Constant && !g.is_zero()) {
        const double gu = (initial_u[f + 1] - initial_u[f]) / h;
        const double g0 = g.at(0.0)[0];
        if (std::fabs(gu - g0) > 1e-8 * (1.0 + std::fabs(gu))) {
          throw ValidationError("constant-tail history of face " + std::to_string(f) +
                                " does not match the initial gradient");
        }
      }
    }
  }
}

std::vector<double> convolution_weights(const RelaxationKernel& kernel, double dt, int count) {
  std::vector<double> w(std::max(count, 1));
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = kernel.cell_moments(static_cast<double>(j) * dt, static_cast<double>(j + 1) * dt).m0;
  }
  return w;
}

double estimate_amplification(const std::vector<double>& weights, double lambda_dt) {
  const std::size_t n = weights.size();
  std::vector<double> u(n + 1, 0.0);
  u[0] = 1.0;
  double amp = 1.0;
  const double denom = 1.0 + lambda_dt * weights[0];
  for (std::size_t m = 0; m < n; ++m) {
    // u[m + 1] uses u[1..m]; the gradient record starts after t = 0.
    double hist = 0.0;
    for (std::size_t j = 1; j <= m; ++j) hist += weights[j] * u[m + 1 - j];
    u[m + 1] = (u[m] - lambda_dt * hist) / denom;
    amp = std::max(amp, std::fabs(u[m + 1]));
    if (!std::isfinite(u[m + 1])) return HUGE_VAL;
  }
  return amp;
}

EvolutionResult evolve(const EvolutionProblem& pr) {
  pr.validate();
  const int nx = pr.nx;
  const int steps = pr.steps();
  const double dx = pr.dx(), dt = pr.dt;

  EvolutionResult out;
  out.x_nodes = node_positions(pr.length, nx);
  out.x_faces = face_positions(pr.length, nx);

  if (!pr.skip_stability_check) {
    const double amp = precheck_amplification(pr.kernel, dt, dx, pr.length, steps);
    out.diagnostics.amplification = amp;
    if (amp > 1.0 + kAmplificationTol) {
      double max_dt = 0.0;
      for (int h = 1; h <= 30; ++h) {
        const double trial = dt * std::ldexp(1.0, -h);
        if (precheck_amplification(pr.kernel, trial, dx, pr.length, steps) <= 1.0 + kAmplificationTol) {
          max_dt = trial;
          break;
        }
      }
      std::ostringstream msg;
      msg << "time step " << dt << " fails the stability precheck (amplification " << amp
          << "); largest admissible step found " << max_dt;
      throw StabilityFailure(msg.str(), amp, max_dt);
    }
  }

  const std::vector<double> w = convolution_weights(pr.kernel, dt, steps);
  const Inflow inflow(pr);
  const double mu = dt * w[0] / (dx * dx);

  std::vector<double> u = pr.initial_u;
  std::vector<double> grad_hist(static_cast<std::size_t>(steps + 1) * nx, 0.0);
  std::vector<double> explicit_part(nx), h(nx), q(nx), rhs(nx - 1), scratch;

  auto record = [&](int n, const std::vector<double>& qv) {
    out.times.push_back(n * dt);
    out.steps.push_back(n);
    out.u.push_back(u);
    out.q.push_back(qv);
    double m = 0.0;
    for (double v : u) m = std::max(m, std::fabs(v));
    out.diagnostics.max_abs_u.push_back(m);
  };

  double err = inflow(0.0, h);
  for (int f = 0; f < nx; ++f) q[f] = -h[f];
  record(0, q);

  for (int n = 0; n < steps; ++n) {
    const double t1 = (n + 1) * dt;
    err = std::max(err, inflow(t1, explicit_part));
    // Explicit history: sum_{j=1}^{n} w_j g^{n+1-j}, gradients g^1..g^n.
    for (int j = 1; j <= n; ++j) {
      const double wj = w[j];
      const double* g = grad_hist.data() + static_cast<std::size_t>(n + 1 - j) * nx;
      for (int f = 0; f < nx; ++f) explicit_part[f] += wj * g[f];
    }
    const double ul = eval_or_zero(pr.left, t1);
    const double ur = eval_or_zero(pr.right, t1);
    for (int i = 1; i < nx; ++i) {
      const double r = pr.source ? pr.source(out.x_nodes[i], t1) : 0.0;
      rhs[i - 1] = u[i] + dt / dx * (explicit_part[i] - explicit_part[i - 1]) + dt * r;
    }
    rhs.front() += mu * ul;
    rhs.back() += mu * ur;
    solve_tridiagonal(mu, rhs, scratch);
    u[0] = ul;
    u[nx] = ur;
    for (int i = 1; i < nx; ++i) u[i] = rhs[i - 1];
    double* g = grad_hist.data() + static_cast<std::size_t>(n + 1) * nx;
    for (int f = 0; f < nx; ++f) {
      g[f] = (u[f + 1] - u[f]) / dx;
      q[f] = -w[0] * g[f] - explicit_part[f];
    }
    if (stored(n + 1, steps, pr.snapshot_stride)) record(n + 1, q);
  }
  out.diagnostics.max_history_error = err;
  std::ostringstream msg;
  msg << "evolve: " << steps << " steps, nx = " << nx << ", amplification "
      << out.diagnostics.amplification;
  log::info(msg.str());
  return out;
}

const std::vector<double>& flux_field(const EvolutionResult& result, std::size_t t_index) {
  if (t_index >= result.q.size()) throw IndexError("snapshot index out of range");
  return result.q[t_index];
}

double conservation_residual(const EvolutionProblem& problem, const EvolutionResult& result,
                             std::size_t n) {
  if (n + 1 >= result.u.size()) throw IndexError("snapshot index out of range");
  if (result.steps[n + 1] != result.steps[n] + 1) {
    throw ValidationError("conservation residual needs consecutive snapshots");
  }
  const double dx = problem.dx(), dt = problem.dt;
  const double t1 = result.times[n + 1];
  const auto& u0 = result.u[n];
  const auto& u1 = result.u[n + 1];
  const auto& q = result.q[n + 1];
  double worst = 0.0;
  for (int i = 1; i < problem.nx; ++i) {
    const double r = problem.source ? problem.source(result.x_nodes[i], t1) : 0.0;
    const double res = u1[i] - u0[i] - dt * (-(q[i] - q[i - 1]) / dx + r);
    worst = std::max(worst, std::fabs(res));
  }
  return worst;
}

EvolutionResult telegraph_oracle(const EvolutionProblem& pr) {
  if (pr.kernel.family() != KernelFamily::Exponential) {
    throw WrongKernelFamily("telegraph oracle needs an exponential kernel");
  }
  pr.validate();
  const int nx = pr.nx;
  const int steps = pr.steps();
  const double dx = pr.dx();
  constexpr int kSub = 10;
  const double delta = pr.dt / kSub;
  const double k0 = pr.kernel.strength();
  const double tau = 1.0 / pr.kernel.rate();

  EvolutionResult out;
  out.x_nodes = node_positions(pr.length, nx);
  out.x_faces = face_positions(pr.length, nx);

  std::vector<double> u = pr.initial_u, q(nx), rhs(nx - 1), scratch, qn(nx);
  const Inflow inflow(pr);
  inflow(0.0, q);
  for (double& v : q) v = -v;

  auto record = [&](int n) {
    out.times.push_back(n * pr.dt);
    out.steps.push_back(n);
    out.u.push_back(u);
    out.q.push_back(q);
    double m = 0.0;
    for (double v : u) m = std::max(m, std::fabs(v));
    out.diagnostics.max_abs_u.push_back(m);
  };
  record(0);

  // q^{m+1} = A q^m - B (D u^{m+1} + D u^m)
  const double c = tau / delta + 0.5;
  const double A = (tau / delta - 0.5) / c;
  const double B = 0.5 * k0 * tau / c;
  const double mu = 0.5 * delta * B / (dx * dx);
  auto src = [&](int i, double t) { return pr.source ? pr.source(out.x_nodes[i], t) : 0.0; };

  for (int n = 0; n < steps; ++n) {
    for (int s = 0; s < kSub; ++s) {
      const double t0 = n * pr.dt + s * delta;
      const double t1 = t0 + delta;
      const double ul = eval_or_zero(pr.left, t1), ur = eval_or_zero(pr.right, t1);
      for (int i = 1; i < nx; ++i) {
        const double lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dx * dx);
        const double dq = (q[i] - q[i - 1]) / dx;
        rhs[i - 1] = u[i] + 0.5 * delta * B * lap - 0.5 * delta * (A + 1.0) * dq +
                     0.5 * delta * (src(i, t0) + src(i, t1));
      }
      rhs.front() += mu * ul;
      rhs.back() += mu * ur;
      solve_tridiagonal(mu, rhs, scratch);
      std::vector<double> un(u);
      u[0] = ul;
      u[nx] = ur;
      for (int i = 1; i < nx; ++i) u[i] = rhs[i - 1];
      for (int f = 0; f < nx; ++f) {
        q[f] = A * q[f] - B * ((u[f + 1] - u[f]) / dx + (un[f + 1] - un[f]) / dx);
      }
    }
    if (stored(n + 1, steps, pr.snapshot_stride)) record(n + 1);
  }
  return out;
}

std::array<double, 2> telegraph_mode_solution(double k0, double tau_r, double sigma, double a0,
                                              double b0, double t) {
  // M = [[0, sigma], [-k0 sigma, -1/tau_r]], exp(M t) = e^{s t} [cosh(d t) I + sinh(d t)/d (M - s I)].
  const double s = -0.5 / tau_r;
  const std::complex<double> d = std::sqrt(std::complex<double>(s * s - k0 * sigma * sigma, 0.0));
  const std::complex<double> ch = std::cosh(d * t);
  const std::complex<double> sh_d = std::abs(d) < 1e-300 ? std::complex<double>(t) : std::sinh(d * t) / d;
  const double e = std::exp(s * t);
  const double m11 = -s, m12 = sigma, m21 = -k0 * sigma, m22 = -1.0 / tau_r - s;
  const double a = e * (ch.real() * a0 + (sh_d * (m11 * a0 + m12 * b0)).real());
  const double b = e * (ch.real() * b0 + (sh_d * (m21 * a0 + m22 * b0)).real());
  return {a, b};
}

}  // namespace memheat
