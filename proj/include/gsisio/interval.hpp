#pragma once

#include "gsisio/matrix.hpp"

namespace gsisio {

/// Box {x : lower <= x <= upper} with finite bounds.
class IntervalVector {
 public:
  IntervalVector() = default;
  /// Throws NumericError on non-finite bounds or lower > upper; DimensionError
  /// when sizes differ.
  IntervalVector(Vector lower, Vector upper);

  /// Degenerate box {x}.
  static IntervalVector point(const Vector& x) { return IntervalVector(x, x); }

  /// Accepts bounds inverted by at most `tol` in any coordinate (floating-point
  /// drift on degenerate boxes) by swapping those coordinates. Larger inversions
  /// throw NumericError.
  static IntervalVector from_bounds(Vector lower, Vector upper, double tol);

  std::size_t size() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  Vector width() const { return upper_ - lower_; }
  Vector center() const;

  bool operator==(const IntervalVector&) const = default;

 private:
  Vector lower_;
  Vector upper_;
};

/// Tight bounds of {A x : x in box}: [A^+ lo - A^- hi, A^+ hi - A^- lo].
IntervalVector linear_map_bounds(const Matrix& a, const IntervalVector& box);

/// Elementwise sup/inf of A x over the 2^n vertices of the box. Reference
/// implementation for testing; n is limited to 20.
IntervalVector linear_map_extrema_oracle(const Matrix& a, const IntervalVector& box);

/// lower - tol <= x <= upper + tol elementwise.
bool contains(const IntervalVector& box, const Vector& x, double tol = 1e-9);

/// Euclidean norm of upper - lower.
double width_norm(const IntervalVector& box);

/// Elementwise intersection; an empty result throws DomainError.
IntervalVector elementwise_meet(const IntervalVector& a, const IntervalVector& b);

/// Vertices of the box in binary-counter order (bit j set selects upper_j).
std::vector<Vector> box_vertices(const IntervalVector& box, std::size_t max_dim = 16);

/// [a; b] as a single box.
IntervalVector concat(const IntervalVector& a, const IntervalVector& b);

}  // namespace gsisio
