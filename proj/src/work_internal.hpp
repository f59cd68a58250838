#pragma once

#include <vector>

#include "memheat/field.hpp"
#include "memheat/kernel.hpp"
#include "memheat/vec.hpp"

namespace memheat::detail {

/// One linear piece of a sampled field: value fa at a, fb at b, b > a.
struct Cell {
  double a, b;
  Vec3 fa, fb;
  Vec3 at(double x) const {
    const double w = (x - a) / (b - a);
    return (1.0 - w) * fa + w * fb;
  }
  bool zero() const { return max_abs(fa) == 0.0 && max_abs(fb) == 0.0; }
};

/// Cells of positive width; jumps are represented by the gaps between them.
std::vector<Cell> cells_of(const SampledField& f);

/// Exact integral of f . phi over [0, horizon] for two fields with Zero tails.
double linear_pairing(const SampledField& f, const SampledField& phi);

}  // namespace memheat::detail
