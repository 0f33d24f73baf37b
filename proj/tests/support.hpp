#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gsisio/interval.hpp"
#include "gsisio/matrix.hpp"

namespace testing_support {

using gsisio::IntervalVector;
using gsisio::Matrix;
using gsisio::Vector;

// Small hand-rolled generator set on top of mt19937_64.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  Vector vector(std::size_t n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  Matrix matrix(std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

  // Product of random factors; rank at most k.
  Matrix low_rank(std::size_t r, std::size_t c, std::size_t k) {
    return matrix(r, k) * matrix(k, c);
  }

  Matrix symmetric(std::size_t n) {
    Matrix a = matrix(n, n);
    return 0.5 * (a + a.transpose());
  }

  IntervalVector box(std::size_t n, double lo = -2.0, double hi = 2.0, double max_width = 1.5) {
    Vector l(n), u(n);
    for (std::size_t i = 0; i < n; ++i) {
      l[i] = uniform(lo, hi);
      u[i] = l[i] + uniform(0.0, max_width);
    }
    return IntervalVector(l, u);
  }

  Vector point_in(const IntervalVector& b) {
    Vector x(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) x[i] = uniform(b.lower()[i], b.upper()[i]);
    return x;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline bool leq(const Vector& a, const Vector& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i] + tol) return false;
  return true;
}

}  // namespace testing_support
