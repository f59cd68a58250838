#include "memheat/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "memheat/errors.hpp"

namespace memheat {

SampledField::SampledField(std::vector<double> grid, std::vector<Vec3> values, Tail tail, int dim)
    : grid_(std::move(grid)), values_(std::move(values)), tail_(tail), dim_(dim) {
  if (dim_ != 1 && dim_ != 3) throw ValidationError("field dimension must be 1 or 3");
  if (grid_.empty()) throw ValidationError("field grid is empty");
  if (grid_.size() != values_.size()) {
    throw ValidationError("field grid and values differ in length");
  }
  if (grid_.front() != 0.0) throw ValidationError("field grid must start at s = 0");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!std::isfinite(grid_[i])) throw ValidationError("field grid contains a non-finite node");
    for (double v : values_[i]) {
      if (!std::isfinite(v)) throw ValidationError("field value is not finite");
    }
    if (dim_ == 1) values_[i][1] = values_[i][2] = 0.0;
    if (i == 0) continue;
    if (grid_[i] < grid_[i - 1]) {
      throw ValidationError("field grid is not increasing at node " + std::to_string(i));
    }
    if (i >= 2 && grid_[i] == grid_[i - 2]) {
      throw ValidationError("field grid repeats a node more than twice");
    }
  }
}

SampledField SampledField::scalar(std::vector<double> grid, std::span<const double> values,
                                  Tail tail) {
  std::vector<Vec3> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = {values[i], 0.0, 0.0};
  return SampledField(std::move(grid), std::move(v), tail, 1);
}

SampledField SampledField::zero(int dim) {
  return SampledField({0.0}, {Vec3{0.0, 0.0, 0.0}}, Tail::Constant, dim);
}

SampledField SampledField::constant(const Vec3& c, int dim) {
  return SampledField({0.0}, {c}, Tail::Constant, dim);
}

SampledField SampledField::indicator(double length, const Vec3& c, int dim) {
  if (!(length > 0.0)) throw ValidationError("indicator length must be positive");
  return SampledField({0.0, length}, {c, c}, Tail::Zero, dim);
}

Vec3 SampledField::tail_value() const {
  return tail_ == Tail::Zero ? Vec3{0.0, 0.0, 0.0} : values_.back();
}

Vec3 SampledField::at(double s) const {
  if (!(s >= 0.0)) throw DomainError("field evaluated at negative argument");
  if (s >= grid_.back()) return tail_value();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[i + 1] - grid_[i];
  const double w = (s - grid_[i]) / h;
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

Vec3 SampledField::left_limit(double s) const {
  if (s <= 0.0) return at(0.0);
  if (s > grid_.back()) return tail_value();
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
  const double h = grid_[j] - grid_[j - 1];
  const double w = (s - grid_[j - 1]) / h;
  return (1.0 - w) * values_[j - 1] + w * values_[j];
}

bool SampledField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Vec3& v) { return v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0; });
}

double SampledField::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, max_abs(v));
  return m;
}

SampledField SampledField::scaled(double a) const {
  std::vector<Vec3> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), [a](const Vec3& x) { return a * x; });
  return SampledField(grid_, std::move(v), tail_, dim_);
}

Vec3 integrate(const SampledField& f, double a, double b) {
  if (!(a >= 0.0) || !(b >= a) || !std::isfinite(b)) {
    throw DomainError("integration bounds must satisfy 0 <= a <= b < inf");
  }
  Vec3 acc{0.0, 0.0, 0.0};
  const auto& grid = f.grid();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double lo = std::max(a, grid[i]);
    const double hi = std::min(b, grid[i + 1]);
    if (!(hi > lo)) continue;
    const double h = grid[i + 1] - grid[i];
    const auto lerp = [&](double s) {
      const double w = (s - grid[i]) / h;
      return (1.0 - w) * f.node_value(i) + w * f.node_value(i + 1);
    };
    acc += (0.5 * (hi - lo)) * (lerp(lo) + lerp(hi));
  }
  const double tail_lo = std::max(a, f.last_node());
  if (b > tail_lo) acc += (b - tail_lo) * f.tail_value();
  return acc;
}

void append_node(std::vector<double>& grid, std::vector<Vec3>& values, double s, const Vec3& v) {
  if (!grid.empty() && grid.back() == s) {
    if (values.back() == v) return;
    if (grid.size() >= 2 && grid[grid.size() - 2] == s) {
      values.back() = v;
      return;
    }
  }
  grid.push_back(s);
  values.push_back(v);
}

SampledField linear_combination(double a, const SampledField& f, double b, const SampledField& g) {
  std::vector<double> breaks;
  breaks.reserve(f.size() + g.size());
  std::merge(f.grid_.begin(), f.grid_.end(), g.grid_.begin(), g.grid_.end(),
             std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> grid;
  std::vector<Vec3> values;
  for (double p : breaks) {
    const Vec3 right = a * f.at(p) + b * g.at(p);
    if (p > 0.0) append_node(grid, values, p, a * f.left_limit(p) + b * g.left_limit(p));
    append_node(grid, values, p, right);
  }
  const Tail tail =
      (f.tail_ == Tail::Constant || g.tail_ == Tail::Constant) ? Tail::Constant : Tail::Zero;
  return SampledField(std::move(grid), std::move(values), tail, std::max(f.dim_, g.dim_));
}

}  // namespace memheat
