#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "memheat/vec.hpp"

namespace memheat {

/// Behavior of a sampled field beyond its last node.
enum class Tail { Zero, Constant };

/// A piecewise-linear function of s >= 0 with values in R^1 or R^3.
///
/// The grid starts at 0 and is nondecreasing. A node may appear twice in a
/// row, which encodes a jump: the first copy holds the left limit, the second
/// the right value. Evaluation is right-continuous everywhere, including at
/// the last node of a Zero-tail field (so an indicator of [0, 1) is the grid
/// {0, 1} with values {1, 1} and a Zero tail).
class SampledField {
 public:
  SampledField() : SampledField(zero()) {}
  SampledField(std::vector<double> grid, std::vector<Vec3> values, Tail tail, int dim = 3);

  static SampledField scalar(std::vector<double> grid, std::span<const double> values, Tail tail);
  /// Identically zero field.
  static SampledField zero(int dim = 3);
  /// Constant field c on [0, inf).
  static SampledField constant(const Vec3& c, int dim = 3);
  /// Value c on [0, length), zero afterwards.
  static SampledField indicator(double length, const Vec3& c, int dim = 3);

  std::size_t size() const { return grid_.size(); }
  int dim() const { return dim_; }
  Tail tail() const { return tail_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<Vec3>& values() const { return values_; }
  double last_node() const { return grid_.back(); }

  /// Right-continuous value at s >= 0.
  Vec3 at(double s) const;
  /// Left limit at s > 0; at s = 0 this returns at(0).
  Vec3 left_limit(double s) const;
  double scalar_at(double s) const { return at(s)[0]; }
  /// Value taken for s beyond the last node.
  Vec3 tail_value() const;

  /// True when the field vanishes identically.
  bool is_zero() const;
  /// Largest component magnitude over nodes and tail.
  double sup_norm() const;

  /// Right-continuous value at node i; cells are (i, i+1) with grid[i] < grid[i+1].
  const Vec3& node_value(std::size_t i) const { return values_[i]; }

  SampledField scaled(double a) const;

  /// a*f + b*g on the union of both grids; jumps are preserved.
  friend SampledField linear_combination(double a, const SampledField& f, double b,
                                         const SampledField& g);
  friend SampledField operator-(const SampledField& f, const SampledField& g) {
    return linear_combination(1.0, f, -1.0, g);
  }
  friend SampledField operator+(const SampledField& f, const SampledField& g) {
    return linear_combination(1.0, f, 1.0, g);
  }

 private:
  std::vector<double> grid_;
  std::vector<Vec3> values_;
  Tail tail_;
  int dim_;
};

/// Exact integral of f over [a, b], 0 <= a <= b < inf, tail included.
Vec3 integrate(const SampledField& f, double a, double b);

/// Appends (s, v) to a grid under construction, skipping exact duplicates and
/// turning a repeated abscissa with a different value into a jump.
void append_node(std::vector<double>& grid, std::vector<Vec3>& values, double s, const Vec3& v);

}  // namespace memheat
