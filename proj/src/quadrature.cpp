#include "memheat/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "memheat/errors.hpp"

namespace memheat::quad {
namespace {

// Gauss-Kronrod 21-point abscissae and weights (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077482203202854, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
};

Segment gk21(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[10];
  double gauss = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  return {a, b, kron * h, std::fabs((kron - gauss) * h)};
}

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// (exp(z) - 1)/z and the integral of v e^(z v) over [0, 1]. Below |z| = 1 both
// are summed as power series, which also covers the |z| < 1e-4 regime where
// the closed forms cancel.
std::complex<double> phi1(std::complex<double> z) {
  if (std::abs(z) < 1.0) {
    std::complex<double> term = 1.0, sum = 1.0;
    for (int k = 1; k < 30 && std::abs(term) > 1e-18; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

std::complex<double> phi2(std::complex<double> z) {
  if (std::abs(z) < 1.0) {
    std::complex<double> power = 1.0, sum = 0.5;
    for (int k = 1; k < 30 && std::abs(power) > 1e-18; ++k) {
      power *= z / static_cast<double>(k);
      sum += power / static_cast<double>(k + 2);
    }
    return sum;
  }
  return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

}  // namespace

GradedMesh GradedMesh::for_singularity(double t_max, int n, double alpha) {
  return {t_max, n, 1.0 / (1.0 - alpha)};
}

std::vector<double> GradedMesh::nodes() const {
  if (!(t_max > 0.0) || n < 2 || !(grading_exponent >= 1.0)) {
    throw ValidationError("graded mesh needs t_max > 0, n >= 2, exponent >= 1");
  }
  std::vector<double> out(n + 1);
  for (int j = 0; j <= n; ++j) {
    out[j] = t_max * std::pow(static_cast<double>(j) / n, grading_exponent);
  }
  out[n] = t_max;
  return out;
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

QuadratureReport<double> integrate_adaptive(const Integrand& f, double a, double b,
                                            const AdaptiveOptions& opts) {
  QuadratureReport<double> report;
  if (a == b) return report;
  std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
  Segment first = gk21(f, a, b);
  report.evaluations = 21;
  double total = first.value;
  double total_error = first.error;
  heap.push(first);
  int subdivisions = 0;
  while (total_error > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
    if (subdivisions >= opts.max_subdivisions) {
      throw QuadratureFailure("adaptive quadrature exceeded subdivision limit", total,
                              total_error);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureFailure("adaptive quadrature reached machine resolution", total,
                              total_error);
    }
    Segment left = gk21(f, worst.a, mid);
    Segment right = gk21(f, mid, worst.b);
    report.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum in interval order so the result does not depend on update history.
  std::vector<Segment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& x, const Segment& y) { return x.a < y.a; });
  std::vector<double> values(segments.size()), errors(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    values[i] = segments[i].value;
    errors[i] = segments[i].error;
  }
  report.value = pairwise_sum(values);
  report.abs_error_estimate = pairwise_sum(errors);
  return report;
}

QuadratureReport<double> adaptive_singular(const Integrand& f, double a, double b, double alpha,
                                           double tol, int max_subdivisions) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("singularity exponent must be in [0, 1)");
  if (!(b >= a)) throw DomainError("adaptive_singular needs a <= b");
  if (alpha == 0.0) return integrate_adaptive(f, a, b, {tol, 0.0, max_subdivisions});
  const double p = 1.0 / (1.0 - alpha);
  const double u_max = std::pow(b - a, 1.0 - alpha);
  auto g = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double up = std::pow(u, p - 1.0);
    return f(a + up * u) * p * up;
  };
  return integrate_adaptive(g, 0.0, u_max, {tol, 0.0, max_subdivisions});
}

QuadratureReport<double> integrate_graded(const Integrand& f, double a, double b, double p,
                                          GradedEnd end, const AdaptiveOptions& opts) {
  if (!(p >= 1.0)) throw DomainError("grading exponent must be >= 1");
  if (a == b) return {};
  const double h = b - a;
  auto from_left = [&](double lo, double len) {
    return [&f, lo, len, p](double u) {
      return f(lo + len * std::pow(u, p)) * len * p * std::pow(u, p - 1.0);
    };
  };
  auto from_right = [&](double hi, double len) {
    return [&f, hi, len, p](double u) {
      return f(hi - len * std::pow(u, p)) * len * p * std::pow(u, p - 1.0);
    };
  };
  switch (end) {
    case GradedEnd::Left:
      return integrate_adaptive(from_left(a, h), 0.0, 1.0, opts);
    case GradedEnd::Right:
      return integrate_adaptive(from_right(b, h), 0.0, 1.0, opts);
    case GradedEnd::Both: {
      AdaptiveOptions half = opts;
      half.abs_tol *= 0.5;
      const auto l = integrate_adaptive(from_left(a, 0.5 * h), 0.0, 1.0, half);
      const auto r = integrate_adaptive(from_right(b, 0.5 * h), 0.0, 1.0, half);
      return {l.value + r.value, l.abs_error_estimate + r.abs_error_estimate,
              l.evaluations + r.evaluations};
    }
  }
  return {};
}

CVec3 filon_linear(const SampledField& f, double omega) {
  const auto& grid = f.grid();
  CVec3 acc{};
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    const double h = grid[i + 1] - a;
    if (h <= 0.0) continue;
    const std::complex<double> z(0.0, -omega * h);
    const std::complex<double> ea = std::polar(1.0, -omega * a);
    const std::complex<double> p1 = phi1(z), p2 = phi2(z);
    const Vec3& fa = f.node_value(i);
    const Vec3& fb = f.node_value(i + 1);
    for (int c = 0; c < 3; ++c) {
      acc[c] += ea * h * (fa[c] * p1 + (fb[c] - fa[c]) * p2);
    }
  }
  return acc;
}

double pairwise_sum(std::span<const double> terms) {
  constexpr std::size_t kBlock = 8;
  if (terms.size() <= kBlock) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace memheat::quad
