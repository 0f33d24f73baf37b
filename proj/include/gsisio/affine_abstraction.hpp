#pragma once

#include <functional>

#include "gsisio/interval.hpp"
#include "gsisio/matrix.hpp"

namespace gsisio {

/// Evaluator of a map R^n -> R^m. Must be reentrant.
using VectorField = std::function<Vector(const Vector&)>;

/// Upper and lower affine planes bounding a field over a box:
///   A_lower x + e_lower <= f(x) <= A_upper x + e_upper.
struct AffineBounds {
  Matrix A_upper;
  Matrix A_lower;
  Vector e_upper;
  Vector e_lower;
  double theta = 0.0;
  Vector sigma;

  /// [A_lower^+ lo - A_lower^- hi + e_lower, A_upper^+ hi - A_upper^- lo + e_upper].
  IntervalVector range_over(const IntervalVector& box) const;
};

struct AbstractionOptions {
  bool pin_slopes = false;  // constant planes only
  std::size_t max_dim = 16;
};

/// Minimises the vertex gap of the planes subject to
///   A_lower x_s + e_lower + sigma <= f(x_s) <= A_upper x_s + e_upper - sigma
/// at every vertex x_s. One LP per output row; theta is the largest row optimum.
AffineBounds abstract_over_box(const VectorField& field, const IntervalVector& box,
                               const Vector& sigma, const AbstractionOptions& options = {});

/// Slope-zero case in closed form: [min_s f(x_s) - sigma, max_s f(x_s) + sigma].
IntervalVector interval_abstraction(const VectorField& field, const IntervalVector& box,
                                    const Vector& sigma, std::size_t max_dim = 16);

/// sigma_i = L_i * |width| / 2 for per-output Lipschitz constants L_i.
Vector lipschitz_sigma(const Vector& lipschitz, const IntervalVector& box);

struct JacobianBounds {
  Matrix lower;
  Matrix upper;
};

/// Central-difference partials sampled on a uniform grid (grid_density points per
/// axis, h = 1e-5 * width_j), then widened by margin * (upper - lower) on each side.
/// Sampling only; nothing here is certified.
JacobianBounds estimate_jacobian_bounds(const VectorField& field, const IntervalVector& box,
                                        std::size_t grid_density, double margin = 0.05);

}  // namespace gsisio
