#include "gsisio/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"

namespace gsisio {

IntervalVector::IntervalVector(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw DimensionError("IntervalVector: lower has " + std::to_string(lower_.size()) +
                         " entries, upper has " + std::to_string(upper_.size()));
  }
  if (!all_finite(lower_) || !all_finite(upper_)) {
    throw NumericError("IntervalVector: non-finite bound");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (lower_[i] > upper_[i]) {
      throw NumericError("IntervalVector: lower > upper in coordinate " + std::to_string(i) +
                         " (" + std::to_string(lower_[i]) + " > " + std::to_string(upper_[i]) +
                         ")");
    }
  }
}

IntervalVector IntervalVector::from_bounds(Vector lower, Vector upper, double tol) {
  if (lower.size() == upper.size()) {
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (lower[i] > upper[i] && lower[i] - upper[i] <= tol) std::swap(lower[i], upper[i]);
    }
  }
  return IntervalVector(std::move(lower), std::move(upper));
}

Vector IntervalVector::center() const { return 0.5 * (lower_ + upper_); }

IntervalVector linear_map_bounds(const Matrix& a, const IntervalVector& box) {
  if (a.cols() != box.size()) {
    throw DimensionError("linear_map_bounds: matrix has " + std::to_string(a.cols()) +
                         " columns, box has dimension " + std::to_string(box.size()));
  }
  const Matrix ap = positive_part(a);
  const Matrix am = negative_part(a);
  return IntervalVector(ap * box.lower() - am * box.upper(), ap * box.upper() - am * box.lower());
}

std::vector<Vector> box_vertices(const IntervalVector& box, std::size_t max_dim) {
  const std::size_t n = box.size();
  if (n > max_dim) {
    throw DomainError("box_vertices: dimension " + std::to_string(n) + " exceeds limit " +
                      std::to_string(max_dim));
  }
  const std::size_t count = std::size_t{1} << n;
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Vector v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = (mask >> j) & 1U ? box.upper()[j] : box.lower()[j];
    out.push_back(std::move(v));
  }
  return out;
}

IntervalVector linear_map_extrema_oracle(const Matrix& a, const IntervalVector& box) {
  if (a.cols() != box.size()) throw DimensionError("linear_map_extrema_oracle: dimension mismatch");
  const auto vertices = box_vertices(box, 20);
  Vector lo(a.rows(), std::numeric_limits<double>::infinity());
  Vector hi(a.rows(), -std::numeric_limits<double>::infinity());
  for (const Vector& v : vertices) {
    const Vector y = a * v;
    lo = elementwise_min(lo, y);
    hi = elementwise_max(hi, y);
  }
  if (a.rows() > 0 && vertices.empty()) throw DomainError("linear_map_extrema_oracle: no vertices");
  return IntervalVector(lo, hi);
}

bool contains(const IntervalVector& box, const Vector& x, double tol) {
  if (x.size() != box.size()) throw DimensionError("contains: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= box.lower()[i] - tol && x[i] <= box.upper()[i] + tol)) return false;
  }
  return true;
}

double width_norm(const IntervalVector& box) { return norm(box.width()); }

IntervalVector elementwise_meet(const IntervalVector& a, const IntervalVector& b) {
  if (a.size() != b.size()) throw DimensionError("elementwise_meet: dimension mismatch");
  Vector lo = elementwise_max(a.lower(), b.lower());
  Vector hi = elementwise_min(a.upper(), b.upper());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) {
      throw DomainError("elementwise_meet: empty intersection in coordinate " + std::to_string(i));
    }
  }
  return IntervalVector(std::move(lo), std::move(hi));
}

IntervalVector concat(const IntervalVector& a, const IntervalVector& b) {
  return IntervalVector(concat(a.lower(), b.lower()), concat(a.upper(), b.upper()));
}

}  // namespace gsisio
