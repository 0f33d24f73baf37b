#include "gsisio/affine_abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"
#include "gsisio/simplex.hpp"

namespace gsisio {

IntervalVector AffineBounds::range_over(const IntervalVector& box) const {
  const IntervalVector up = linear_map_bounds(A_upper, box);
  const IntervalVector lo = linear_map_bounds(A_lower, box);
  return IntervalVector(lo.lower() + e_lower, up.upper() + e_upper);
}

namespace {

struct Samples {
  std::vector<Vector> points;
  std::vector<Vector> values;
};

Samples sample_vertices(const VectorField& field, const IntervalVector& box, const Vector& sigma,
                        std::size_t max_dim) {
  Samples s;
  s.points = box_vertices(box, max_dim);
  s.values.reserve(s.points.size());
  for (const Vector& x : s.points) {
    Vector f = field(x);
    if (!all_finite(f)) throw NumericError("abstraction: field is not finite at a box vertex");
    if (!s.values.empty() && f.size() != s.values.front().size()) {
      throw DimensionError("abstraction: field output size varies between vertices");
    }
    s.values.push_back(std::move(f));
  }
  const std::size_t m = s.values.front().size();
  if (sigma.size() != m) {
    throw DimensionError("abstraction: sigma has " + std::to_string(sigma.size()) +
                         " entries for a field with " + std::to_string(m) + " outputs");
  }
  for (double v : sigma) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("abstraction: sigma must be finite and >= 0");
  }
  return s;
}

}  // namespace

AffineBounds abstract_over_box(const VectorField& field, const IntervalVector& box,
                               const Vector& sigma, const AbstractionOptions& options) {
  const Samples s = sample_vertices(field, box, sigma, options.max_dim);
  const std::size_t n = box.size();
  const std::size_t m = sigma.size();
  const std::size_t nv = s.points.size();

  AffineBounds out{Matrix(m, n), Matrix(m, n), Vector(m), Vector(m), 0.0, sigma};

  if (options.pin_slopes) {
    const IntervalVector r = interval_abstraction(field, box, sigma, options.max_dim);
    for (std::size_t i = 0; i < m; ++i) {
      out.e_upper[i] = r.upper()[i];
      out.e_lower[i] = r.lower()[i];
      out.theta = std::max(out.theta, r.upper()[i] - r.lower()[i] - 2.0 * sigma[i]);
    }
    return out;
  }

  // Variables: a_up (n), a_lo (n), e_up, e_lo, theta.
  const std::size_t nvar = 2 * n + 3;
  const std::size_t iu = 2 * n, il = 2 * n + 1, it = 2 * n + 2;
  for (std::size_t i = 0; i < m; ++i) {
    LinearProgram lp;
    lp.objective = Vector(nvar);
    lp.objective[it] = 1.0;
    lp.constraints = Matrix(3 * nv, nvar);
    lp.rhs = Vector(3 * nv);
    lp.free.assign(nvar, true);
    for (std::size_t v = 0; v < nv; ++v) {
      const Vector& x = s.points[v];
      const double f = s.values[v][i];
      const std::size_t r0 = 3 * v;
      for (std::size_t j = 0; j < n; ++j) {
        lp.constraints(r0, j) = -x[j];
        lp.constraints(r0 + 1, n + j) = x[j];
        lp.constraints(r0 + 2, j) = x[j];
        lp.constraints(r0 + 2, n + j) = -x[j];
      }
      lp.constraints(r0, iu) = -1.0;
      lp.rhs[r0] = -f - sigma[i];
      lp.constraints(r0 + 1, il) = 1.0;
      lp.rhs[r0 + 1] = f - sigma[i];
      lp.constraints(r0 + 2, iu) = 1.0;
      lp.constraints(r0 + 2, il) = -1.0;
      lp.constraints(r0 + 2, it) = -1.0;
      lp.rhs[r0 + 2] = 2.0 * sigma[i];
    }
    const LpResult res = simplex_solve(lp);
    if (!res.optimal()) {
      throw NumericError("abstraction: LP for output " + std::to_string(i) + " returned " +
                         (res.status == LpStatus::kInfeasible ? "infeasible" : "unbounded"));
    }
    for (std::size_t j = 0; j < n; ++j) {
      out.A_upper(i, j) = res.solution[j];
      out.A_lower(i, j) = res.solution[n + j];
    }
    out.e_upper[i] = res.solution[iu];
    out.e_lower[i] = res.solution[il];
    out.theta = std::max(out.theta, res.solution[it]);
  }
  return out;
}

IntervalVector interval_abstraction(const VectorField& field, const IntervalVector& box,
                                    const Vector& sigma, std::size_t max_dim) {
  const Samples s = sample_vertices(field, box, sigma, max_dim);
  const std::size_t m = sigma.size();
  Vector lo(m, std::numeric_limits<double>::infinity());
  Vector hi(m, -std::numeric_limits<double>::infinity());
  for (const Vector& f : s.values) {
    lo = elementwise_min(lo, f);
    hi = elementwise_max(hi, f);
  }
  return IntervalVector(lo - sigma, hi + sigma);
}

Vector lipschitz_sigma(const Vector& lipschitz, const IntervalVector& box) {
  const double half_diag = 0.5 * width_norm(box);
  Vector out(lipschitz.size());
  for (std::size_t i = 0; i < lipschitz.size(); ++i) {
    if (!(lipschitz[i] >= 0.0)) throw DomainError("lipschitz_sigma: constants must be >= 0");
    out[i] = lipschitz[i] * half_diag;
  }
  return out;
}

JacobianBounds estimate_jacobian_bounds(const VectorField& field, const IntervalVector& box,
                                        std::size_t grid_density, double margin) {
  if (grid_density < 2) throw DomainError("estimate_jacobian_bounds: grid_density must be >= 2");
  if (!(margin >= 0.0)) throw DomainError("estimate_jacobian_bounds: margin must be >= 0");
  const std::size_t n = box.size();
  if (n == 0) throw DimensionError("estimate_jacobian_bounds: empty box");
  const Vector w = box.width();

  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (total > 10'000'000 / grid_density) throw DomainError("estimate_jacobian_bounds: grid too large");
    total *= grid_density;
  }

  Matrix lo, hi;
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t t = 0; t < total; ++t) {
    Vector x(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = box.lower()[j] + w[j] * static_cast<double>(idx[j]) / static_cast<double>(grid_density - 1);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] == 0.0) continue;
      const double h = 1e-5 * w[j];
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vector d = (1.0 / (2.0 * h)) * (field(xp) - field(xm));
      if (lo.empty()) {
        lo = Matrix(d.size(), n, std::numeric_limits<double>::infinity());
        hi = Matrix(d.size(), n, -std::numeric_limits<double>::infinity());
      }
      if (d.size() != lo.rows()) throw DimensionError("estimate_jacobian_bounds: output size varies");
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d[i])) throw NumericError("estimate_jacobian_bounds: non-finite derivative");
        lo(i, j) = std::min(lo(i, j), d[i]);
        hi(i, j) = std::max(hi(i, j), d[i]);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (++idx[j] < grid_density) break;
      idx[j] = 0;
    }
  }

  if (lo.empty()) {
    // Degenerate box: partials at the single point.
    const Vector x = box.lower();
    const std::size_t m = field(x).size();
    lo = Matrix(m, n);
    hi = Matrix(m, n);
    for (std::size_t j = 0; j < n; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vector d = (1.0 / (2.0 * h)) * (field(xp) - field(xm));
      for (std::size_t i = 0; i < m; ++i) lo(i, j) = hi(i, j) = d[i];
    }
  } else {
    // Axes with zero width were skipped; evaluate them at the box's lower corner.
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] != 0.0) continue;
      const Vector x = box.lower();
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      Vector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vector d = (1.0 / (2.0 * h)) * (field(xp) - field(xm));
      for (std::size_t i = 0; i < d.size(); ++i) lo(i, j) = hi(i, j) = d[i];
    }
  }

  for (std::size_t i = 0; i < lo.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double pad = margin * (hi(i, j) - lo(i, j));
      lo(i, j) -= pad;
      hi(i, j) += pad;
    }
  }
  return {lo, hi};
}

}  // namespace gsisio
