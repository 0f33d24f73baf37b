#include "gsisio/mixed_monotone.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"

namespace gsisio {

void NonlinearField::validate() const {
  if (!evaluate) throw DomainError("field: missing evaluator");
  if (jacobian_lower.rows() != dim_out || jacobian_lower.cols() != dim_in ||
      jacobian_upper.rows() != dim_out || jacobian_upper.cols() != dim_in) {
    throw DimensionError("field: Jacobian bounds must be " + std::to_string(dim_out) + "x" +
                         std::to_string(dim_in));
  }
  if (!jacobian_lower.all_finite() || !jacobian_upper.all_finite()) {
    throw NumericError("field: Jacobian bounds must be finite");
  }
  for (std::size_t i = 0; i < dim_out; ++i)
    for (std::size_t j = 0; j < dim_in; ++j)
      if (jacobian_lower(i, j) > jacobian_upper(i, j)) {
        throw DomainError("field: Jacobian lower bound exceeds upper bound at (" + std::to_string(i + 1) +
                          "," + std::to_string(j + 1) + ")");
      }
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw DomainError("field: Lipschitz constant must be > 0");
}

Vector NonlinearField::operator()(const Vector& x) const {
  if (x.size() != dim_in) throw DimensionError("field: expected input of size " + std::to_string(dim_in));
  Vector y = evaluate(x);
  if (y.size() != dim_out) throw DimensionError("field: evaluator returned size " + std::to_string(y.size()));
  if (!all_finite(y)) throw NumericError("field: evaluator returned a non-finite value");
  return y;
}

DecompositionFunction::DecompositionFunction(NonlinearField base, Matrix correction,
                                             std::vector<std::vector<bool>> take_y)
    : base_(std::move(base)), correction_(std::move(correction)), take_y_(std::move(take_y)) {
  if (correction_.rows() != base_.dim_out || correction_.cols() != base_.dim_in ||
      take_y_.size() != base_.dim_out) {
    throw DimensionError("decomposition: correction/selector shape mismatch");
  }
  for (const auto& row : take_y_)
    if (row.size() != base_.dim_in) throw DimensionError("decomposition: selector row size mismatch");
}

Vector DecompositionFunction::operator()(const Vector& x, const Vector& y) const {
  const std::size_t n = base_.dim_in;
  if (x.size() != n || y.size() != n) throw DimensionError("decomposition: argument size mismatch");
  Vector out = correction_ * (x - y);
  Vector z(n);
  for (std::size_t i = 0; i < base_.dim_out; ++i) {
    for (std::size_t j = 0; j < n; ++j) z[j] = take_y_[i][j] ? y[j] : x[j];
    out[i] += base_(z)[i];
  }
  return out;
}

DecompositionFunction build_decomposition(const NonlinearField& field) {
  field.validate();
  const std::size_t m = field.dim_out, n = field.dim_in;
  Matrix c(m, n);
  std::vector<std::vector<bool>> take_y(m, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = field.jacobian_lower(i, j), b = field.jacobian_upper(i, j);
      if (a >= 0.0) continue;
      if (b <= 0.0) {
        take_y[i][j] = true;
      } else if (-a <= b) {
        c(i, j) = -a;
      } else {
        take_y[i][j] = true;
        c(i, j) = b;
      }
    }
  }
  return DecompositionFunction(field, c, std::move(take_y));
}

Vector eval_decomposition(const DecompositionFunction& dec, const Vector& x, const Vector& y) {
  return dec(x, y);
}

IntervalVector embed_bounds(const DecompositionFunction& dec, const IntervalVector& box) {
  return IntervalVector::from_bounds(dec(box.lower(), box.upper()), dec(box.upper(), box.lower()), 1e-12);
}

IntervalVector refined_bounds(const DecompositionFunction& dec, const AffineBounds& affine,
                                const IntervalVector& box) {
  return elementwise_meet(embed_bounds(dec, box), affine.range_over(box));
}

double lipschitz_like_constant(const DecompositionFunction& dec) {
  return dec.base().lipschitz + 2.0 * spectral_norm(dec.correction());
}

double jacobian_lipschitz_bound(const Matrix& lower, const Matrix& upper) {
  if (lower.rows() != upper.rows() || lower.cols() != upper.cols()) {
    throw DimensionError("jacobian_lipschitz_bound: shape mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < lower.rows(); ++i)
    for (std::size_t j = 0; j < lower.cols(); ++j)
      s += std::max(lower(i, j) * lower(i, j), upper(i, j) * upper(i, j));
  return std::sqrt(s);
}

LipschitzEstimate sample_lipschitz_estimate(const VectorField& q, const IntervalVector& box,
                                            std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    Vector x(box.size());
    for (std::size_t j = 0; j < box.size(); ++j)
      x[j] = std::uniform_real_distribution<double>(box.lower()[j], box.upper()[j])(rng);
    return x;
  };
  LipschitzEstimate est;
  for (std::size_t t = 0; t < pairs; ++t) {
    const Vector a = draw(), b = draw();
    const double d = norm(a - b);
    if (d == 0.0) continue;
    est.value = std::max(est.value, norm(q(a) - q(b)) / d);
  }
  return est;
}

}  // namespace gsisio
