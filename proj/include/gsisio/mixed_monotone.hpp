#pragma once

#include <cstdint>
#include <vector>

#include "gsisio/affine_abstraction.hpp"
#include "gsisio/interval.hpp"
#include "gsisio/matrix.hpp"

namespace gsisio {

/// A map q: R^n -> R^m with a Lipschitz constant and elementwise Jacobian bounds
/// a_ij <= dq_i/dx_j <= b_ij on the working domain.
struct NonlinearField {
  std::size_t dim_in = 0;
  std::size_t dim_out = 0;
  VectorField evaluate;
  double lipschitz = 0.0;
  Matrix jacobian_lower;
  Matrix jacobian_upper;

  /// Throws DimensionError / DomainError on inconsistent data.
  void validate() const;
  Vector operator()(const Vector& x) const;
};

/// q_d(x, y)_i = q_i(z^(i)) + (C (x - y))_i, where z^(i)_j is x_j or y_j.
class DecompositionFunction {
 public:
  DecompositionFunction() = default;
  DecompositionFunction(NonlinearField base, Matrix correction, std::vector<std::vector<bool>> take_y);

  const NonlinearField& base() const { return base_; }
  const Matrix& correction() const { return correction_; }
  /// True where z^(i)_j is taken from the second argument.
  bool takes_second(std::size_t i, std::size_t j) const { return take_y_[i][j]; }

  Vector operator()(const Vector& x, const Vector& y) const;

 private:
  NonlinearField base_;
  Matrix correction_;
  std::vector<std::vector<bool>> take_y_;
};

/// Per entry: a >= 0 -> x, no correction; b <= 0 -> y, no correction;
/// a < 0 < b -> x with C = -a if |a| <= b, otherwise y with C = b.
DecompositionFunction build_decomposition(const NonlinearField& field);

Vector eval_decomposition(const DecompositionFunction& dec, const Vector& x, const Vector& y);

/// [q_d(lo, hi), q_d(hi, lo)].
IntervalVector embed_bounds(const DecompositionFunction& dec, const IntervalVector& box);

/// Meet of embed_bounds and the affine planes' range over the box.
IntervalVector refined_bounds(const DecompositionFunction& dec, const AffineBounds& affine,
                                const IntervalVector& box);

/// L_q + 2 ||C||.
double lipschitz_like_constant(const DecompositionFunction& dec);

/// sqrt(sum_ij max(a_ij^2, b_ij^2)): a Lipschitz constant valid for any field
/// whose Jacobian lies in the bounds on a convex domain.
double jacobian_lipschitz_bound(const Matrix& lower, const Matrix& upper);

struct LipschitzEstimate {
  double value = 0.0;
  bool certified = false;  // always false: sampling gives a lower bound only
};

/// Largest ||q(x1) - q(x2)|| / ||x1 - x2|| over random pairs in the box.
LipschitzEstimate sample_lipschitz_estimate(const VectorField& q, const IntervalVector& box,
                                            std::size_t pairs, std::uint64_t seed);

}  // namespace gsisio
