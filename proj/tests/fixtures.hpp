#pragma once

#include <cmath>
#include <string>

#include "gsisio/mixed_monotone.hpp"
#include "gsisio/scenario.hpp"

namespace testing_support {

inline gsisio::Scenario reference_scenario() {
  return gsisio::build_scenario(gsisio::parse_scenario(gsisio::reference_scenario_text()));
}

inline gsisio::Scenario companion_scenario() {
  return gsisio::build_scenario(gsisio::load_scenario(std::string(GSISIO_CONFIG_DIR) + "/full_rank_companion.json"));
}

// q(x) = W x + diag(c) sin(V x), Jacobian bounds W_ij -+ |c_i V_ij|.
template <typename Gen>
gsisio::NonlinearField random_field(Gen& g, std::size_t n, std::size_t m) {
  using gsisio::Matrix;
  using gsisio::Vector;
  const Matrix W = g.matrix(m, n, -1, 1);
  const Matrix V = g.matrix(m, n, -1, 1);
  const Vector c = g.vector(m, -0.6, 0.6);
  gsisio::NonlinearField q;
  q.dim_in = n;
  q.dim_out = m;
  q.evaluate = [W, V, c](const Vector& x) {
    Vector y = W * x;
    const Vector s = V * x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c[i] * std::sin(s[i]);
    return y;
  };
  q.jacobian_lower = Matrix(m, n);
  q.jacobian_upper = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = std::abs(c[i] * V(i, j));
      q.jacobian_lower(i, j) = W(i, j) - r;
      q.jacobian_upper(i, j) = W(i, j) + r;
    }
  q.lipschitz = gsisio::jacobian_lipschitz_bound(q.jacobian_lower, q.jacobian_upper);
  return q;
}

}  // namespace testing_support
