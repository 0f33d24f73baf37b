#include "gsisio/observer.hpp"

#include <algorithm>
#include <cmath>

#include "gsisio/affine_abstraction.hpp"
#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"

namespace gsisio {

namespace {

void require_shape(const Matrix& m, std::size_t r, std::size_t c, const char* name) {
  if (m.rows() != r || m.cols() != c) {
    throw DimensionError(std::string("model: ") + name + " must be " + std::to_string(r) + "x" +
                         std::to_string(c) + ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_size(const Vector& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    throw DimensionError(std::string(name) + " must have " + std::to_string(n) + " entries, got " +
                         std::to_string(v.size()));
  }
}

Vector stack2(const IntervalVector& b) { return concat(b.upper(), b.lower()); }

// Per-output Lipschitz constants: the smaller of the global constant and the
// row bound implied by the Jacobian bounds.
Vector row_lipschitz(const NonlinearField& q) {
  Vector out(q.dim_out);
  for (std::size_t i = 0; i < q.dim_out; ++i) {
    const double row = jacobian_lipschitz_bound(q.jacobian_lower.row_range(i, 1), q.jacobian_upper.row_range(i, 1));
    out[i] = std::min(q.lipschitz, row);
  }
  return out;
}

IntervalVector bound_field(const NonlinearField& q, const BoundingOptions& opts, const Vector& fixed_sigma,
                           const IntervalVector& box) {
  const DecompositionFunction dec = build_decomposition(q);
  if (!opts.use_affine) return embed_bounds(dec, box);
  const Vector sigma = opts.sigma_policy == SigmaPolicy::kFixed ? fixed_sigma : lipschitz_sigma(row_lipschitz(q), box);
  const AffineBounds ab = abstract_over_box(q.evaluate, box, sigma);
  return refined_bounds(dec, ab, box);
}

IntervalVector split_framer(const Vector& s, std::size_t n, const char* what) {
  Vector up = s.segment(0, n), lo = s.segment(n, n);
  double scale = 1.0;
  for (double v : s) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    if (lo[i] > up[i] + 1e-9 * scale) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: inverted bounds in component %zu (lower %.6g > upper %.6g)", what, i + 1,
                    lo[i], up[i]);
      throw NumericError(buf);
    }
  }
  return IntervalVector::from_bounds(lo, up, 1e-9 * scale);
}

InputEstimate input_from_bounds(const SystemModel& model, const ObserverGains& gains, const IntervalVector& cur,
                                const FieldBounds& fb, const Vector& y_prev, const Vector& u_prev) {
  const Matrix BD = vstack(model.B, model.D);
  const Vector bu = BD * u_prev;
  const Vector h_up = concat(cur.upper(), y_prev) - concat(fb.f.lower(), fb.g.lower()) - bu -
                      concat(model.w_bounds.lower(), model.v_bounds.lower());
  const Vector h_lo = concat(cur.lower(), y_prev) - concat(fb.f.upper(), fb.g.upper()) - bu -
                      concat(model.w_bounds.upper(), model.v_bounds.upper());
  return {input_bounds_from_h(gains, h_lo, h_up), h_up, h_lo};
}

IntervalVector state_from_bounds(const SystemModel& model, const ObserverGains& gains, const FieldBounds& fb,
                                 const Vector& y_prev, const Vector& u_prev) {
  if (!gains.exists) {
    throw ExistenceError("observer: existence condition fails (rk(I-K1-L1) = " + std::to_string(gains.rank_minus) +
                             ", rk(I-K1+L1) = " + std::to_string(gains.rank_plus) + ", need " +
                             std::to_string(model.n) + ")",
                         gains.rank_minus, gains.rank_plus);
  }
  const Vector s = gains.M_f * stack2(fb.f) + gains.M_g * stack2(fb.g) + gains.M_v * stack2(model.v_bounds) +
                   gains.M_w * stack2(model.w_bounds) + gains.M_y * y_prev + gains.M_u * u_prev;
  return split_framer(s, model.n, "propagate_state");
}

}  // namespace

void SystemModel::validate() const {
  if (n == 0 || p == 0 || l == 0) throw DimensionError("model: n, p and l must be positive");
  f.validate();
  g.validate();
  if (f.dim_in != n || f.dim_out != n) throw DimensionError("model: f must map R^n to R^n");
  if (g.dim_in != n || g.dim_out != l) throw DimensionError("model: g must map R^n to R^l");
  require_shape(B, n, m, "B");
  require_shape(D, l, m, "D");
  require_shape(G, n, p, "G");
  require_shape(H, l, p, "H");
  if (w_bounds.size() != n) throw DimensionError("model: w bounds must have n entries");
  if (v_bounds.size() != l) throw DimensionError("model: v bounds must have l entries");
  if (x0_bounds.size() != n) throw DimensionError("model: initial box must have n entries");
  if (bounding.sigma_policy == SigmaPolicy::kFixed) {
    require_size(bounding.sigma_f, n, "sigma_f");
    require_size(bounding.sigma_g, l, "sigma_g");
  }
  const int r = numeric_rank(vstack(G, H));
  if (r != static_cast<int>(p)) {
    throw DomainError("model: [G; H] must have full column rank " + std::to_string(p) + ", has rank " +
                      std::to_string(r));
  }
}

ObserverGains synthesize_gains(const SystemModel& model) {
  model.validate();
  const std::size_t n = model.n, l = model.l;
  const Matrix I = Matrix::identity(n);
  ObserverGains g;
  g.J = pinv(vstack(model.G, model.H));
  const SignSplit js = sign_split(g.J);
  const SignSplit gs = sign_split(model.G);
  g.N11 = g.N22 = js.plus;
  g.N12 = g.N21 = -js.minus;
  g.K = gs.minus * js.minus + gs.plus * js.plus;
  g.L = gs.minus * js.plus + gs.plus * js.minus;
  g.K1 = g.K.columns(0, n);
  g.K2 = g.K.columns(n, l);
  g.L1 = g.L.columns(0, n);
  g.L2 = g.L.columns(n, l);
  g.F = (I + g.L1 - g.K1) * model.B + (g.L2 - g.K2) * model.D;

  g.A_x = block2x2(I - g.K1, g.L1, g.L1, I - g.K1);
  g.A_f = block2x2(I + g.L1, -g.K1, -g.K1, I + g.L1);
  g.A_w = g.A_f;
  g.A_g = block2x2(g.L2, -g.K2, -g.K2, g.L2);
  g.A_v = g.A_g;
  g.A_u = vstack(g.F, g.F);
  g.A_y = vstack(g.K2 - g.L2, g.K2 - g.L2);
  g.A_x_pinv = pinv(g.A_x);
  g.M_f = g.A_x_pinv * g.A_f;
  g.M_g = g.A_x_pinv * g.A_g;
  g.M_u = g.A_x_pinv * g.A_u;
  g.M_w = g.A_x_pinv * g.A_w;
  g.M_v = g.A_x_pinv * g.A_v;
  g.M_y = g.A_x_pinv * g.A_y;

  g.rank_minus = numeric_rank(I - g.K1 - g.L1, kExistenceRankTolerance);
  g.rank_plus = numeric_rank(I - g.K1 + g.L1, kExistenceRankTolerance);
  g.exists = check_existence(g, n);

  const Matrix E = block2x2(I - g.K1, -g.L1, -g.L1, I - g.K1);
  if (numeric_rank(E, kExistenceRankTolerance) == static_cast<int>(2 * n)) {
    const Matrix Ei = pinv(E);
    g.inverse_nonnegative = true;
    for (std::size_t i = 0; i < Ei.rows(); ++i)
      for (std::size_t j = 0; j < Ei.cols(); ++j) g.inverse_nonnegative &= Ei(i, j) >= -1e-12;
  }
  return g;
}

bool check_existence(const ObserverGains& gains, std::size_t n) {
  if (gains.K1.rows() != n || gains.K1.cols() != n || gains.L1.rows() != n || gains.L1.cols() != n) {
    throw DimensionError("check_existence: K1 and L1 must be n x n");
  }
  const Matrix I = Matrix::identity(n);
  const int want = static_cast<int>(n);
  return numeric_rank(I - gains.K1 - gains.L1, kExistenceRankTolerance) == want &&
         numeric_rank(I - gains.K1 + gains.L1, kExistenceRankTolerance) == want;
}

FieldBounds nonlinear_bounds(const SystemModel& model, const IntervalVector& box) {
  return {bound_field(model.f, model.bounding, model.bounding.sigma_f, box),
          bound_field(model.g, model.bounding, model.bounding.sigma_g, box)};
}

FramerState initial_state(const SystemModel& model) { return FramerState{0, model.x0_bounds, std::nullopt, {}, {}}; }

IntervalVector propagate_state(const SystemModel& model, const ObserverGains& gains, const FramerState& prev,
                               const Vector& y_prev, const Vector& u_prev) {
  require_size(y_prev, model.l, "propagate_state: y");
  require_size(u_prev, model.m, "propagate_state: u");
  return state_from_bounds(model, gains, nonlinear_bounds(model, prev.x_box), y_prev, u_prev);
}

IntervalVector input_bounds_from_h(const ObserverGains& gains, const Vector& h_lower, const Vector& h_upper) {
  if (h_lower.size() != gains.N11.cols() || h_upper.size() != gains.N11.cols())
    throw DimensionError("input_bounds_from_h: h must have n + l entries");
  const Vector d_up = gains.N11 * h_upper + gains.N12 * h_lower;
  const Vector d_lo = gains.N21 * h_upper + gains.N22 * h_lower;
  for (std::size_t i = 0; i < d_up.size(); ++i)
    if (d_lo[i] > d_up[i] + 1e-12 * std::max(1.0, std::abs(d_up[i])))
      throw NumericError("input bounds inverted (h lower exceeds h upper)");
  return IntervalVector::from_bounds(d_lo, d_up, 1e-9);
}

InputEstimate estimate_input(const SystemModel& model, const ObserverGains& gains, const IntervalVector& cur_x_box,
                             const IntervalVector& prev_x_box, const Vector& y_prev, const Vector& u_prev) {
  require_size(y_prev, model.l, "estimate_input: y");
  require_size(u_prev, model.m, "estimate_input: u");
  if (cur_x_box.size() != model.n || prev_x_box.size() != model.n)
    throw DimensionError("estimate_input: state boxes must have n entries");
  return input_from_bounds(model, gains, cur_x_box, nonlinear_bounds(model, prev_x_box), y_prev, u_prev);
}

FramerState observer_step(const SystemModel& model, const ObserverGains& gains, const FramerState& prev,
                          const Vector& y_prev, const Vector& u_prev) {
  require_size(y_prev, model.l, "observer_step: y");
  require_size(u_prev, model.m, "observer_step: u");
  const FieldBounds fb = nonlinear_bounds(model, prev.x_box);
  IntervalVector x = state_from_bounds(model, gains, fb, y_prev, u_prev);
  InputEstimate d = input_from_bounds(model, gains, x, fb, y_prev, u_prev);
  return FramerState{prev.k + 1, std::move(x), std::move(d.d_box), std::move(d.h_upper), std::move(d.h_lower)};
}

FeedthroughSvd decompose_feedthrough(const Matrix& H) {
  const SvdResult s = svd(H);
  const std::size_t l = H.rows(), p = H.cols();
  const std::size_t r = static_cast<std::size_t>(numeric_rank(H));
  FeedthroughSvd out;
  out.rank = r;
  out.U1 = s.U.columns(0, r);
  out.U2 = s.U.columns(r, l - r);
  out.V1 = s.V.columns(0, r);
  out.V2 = s.V.columns(r, p - r);
  out.Sigma = Matrix(r, r);
  out.Phi = Matrix(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    out.Sigma(i, i) = s.singular_values[i];
    out.Phi(i, i) = 1.0 / s.singular_values[i];
  }
  out.T1 = out.U1.transpose();
  out.T2 = out.U2.transpose();
  return out;
}

std::optional<IntervalVector> estimate_current_input_component(const SystemModel& model, const FeedthroughSvd& svd,
                                                               const Vector& y_k, const Vector& u_k,
                                                               const IntervalVector& x_box_k) {
  if (svd.rank == 0) return std::nullopt;
  require_size(y_k, model.l, "estimate_current_input_component: y");
  require_size(u_k, model.m, "estimate_current_input_component: u");
  const IntervalVector gb = bound_field(model.g, model.bounding, model.bounding.sigma_g, x_box_k);
  const Matrix PT = svd.Phi * svd.T1;
  const SignSplit ps = sign_split(PT);
  const Vector gu = gb.upper() + model.v_bounds.upper();
  const Vector gl = gb.lower() + model.v_bounds.lower();
  const Vector l_up = ps.minus * gu - ps.plus * gl;
  const Vector l_lo = ps.minus * gl - ps.plus * gu;
  const Vector base = svd.Phi * (svd.T1 * y_k - svd.T1 * (model.D * u_k));
  return IntervalVector::from_bounds(base + l_lo, base + l_up, 1e-12);
}

}  // namespace gsisio
