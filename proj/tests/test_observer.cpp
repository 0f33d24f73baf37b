#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"
#include "gsisio/observer.hpp"
#include "gsisio/stability.hpp"
#include "support.hpp"

using namespace gsisio;
using testing_support::Gen;

namespace {

NonlinearField linear_field(const Matrix& A) {
  NonlinearField q;
  q.dim_in = A.cols();
  q.dim_out = A.rows();
  q.evaluate = [A](const Vector& x) { return A * x; };
  q.jacobian_lower = A;
  q.jacobian_upper = A;
  q.lipschitz = std::max(spectral_norm(A), 1e-12);
  return q;
}

SystemModel linear_model(const Matrix& A, const Matrix& C, const Matrix& G, const Matrix& H, double noise) {
  SystemModel m;
  m.n = A.rows();
  m.l = C.rows();
  m.p = G.cols();
  m.m = 1;
  m.f = linear_field(A);
  m.g = linear_field(C);
  m.B = Matrix(m.n, 1);
  m.D = Matrix(m.l, 1);
  m.G = G;
  m.H = H;
  m.w_bounds = IntervalVector(Vector(m.n, -noise), Vector(m.n, noise));
  m.v_bounds = IntervalVector(Vector(m.l, -noise), Vector(m.l, noise));
  m.x0_bounds = IntervalVector(Vector(m.n, -1.0), Vector(m.n, 1.0));
  return m;
}

struct Run {
  std::vector<Vector> x, d, y;
};

// Ground truth with an arbitrary bounded input sequence.
Run simulate(const SystemModel& m, std::mt19937_64& rng, std::size_t K, double d_mag) {
  auto unif = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto in_box = [&](const IntervalVector& b) {
    Vector v(b.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = unif(b.lower()[i], b.upper()[i]);
    return v;
  };
  Run r;
  Vector x = in_box(m.x0_bounds);
  const Vector u(m.m);
  for (std::size_t k = 0; k <= K; ++k) {
    Vector d(m.p);
    for (auto& e : d) e = unif(-d_mag, d_mag);
    r.x.push_back(x);
    r.d.push_back(d);
    r.y.push_back(m.g(x) + m.D * u + m.H * d + in_box(m.v_bounds));
    x = m.f(x) + m.B * u + m.G * d + in_box(m.w_bounds);
  }
  return r;
}

// sup/inf of J h over the vertices of [h_lo, h_up].
IntervalVector vertex_oracle(const Matrix& J, const Vector& h_lo, const Vector& h_up) {
  return linear_map_extrema_oracle(J, IntervalVector(h_lo, h_up));
}

}  // namespace

TEST_CASE("gains for G = I, H = 0") {
  const SystemModel m = linear_model(Matrix{{0.5, 0}, {0, 0.5}}, Matrix{{1, 0}, {0, 1}}, Matrix::identity(2),
                                     Matrix(2, 2), 0.1);
  const ObserverGains g = synthesize_gains(m);
  CHECK(max_abs_diff(g.J, hstack(Matrix::identity(2), Matrix(2, 2))) < 1e-12);
  CHECK(max_abs_diff(g.K, hstack(Matrix::identity(2), Matrix(2, 2))) < 1e-12);
  CHECK(g.L.max_abs() < 1e-12);
  CHECK_FALSE(g.exists);
}

TEST_CASE("gain structure on the reference model") {
  const Scenario s = testing_support::reference_scenario();
  const ObserverGains g = synthesize_gains(s.model);
  CHECK(max_abs_diff(g.J * vstack(s.model.G, s.model.H), Matrix::identity(2)) < 1e-10);
  CHECK(g.N11 == positive_part(g.J));
  CHECK(g.N22 == positive_part(g.J));
  CHECK(g.N12 == -1.0 * negative_part(g.J));
  CHECK(g.N21 == g.N12);
  const SignSplit gs = sign_split(s.model.G), js = sign_split(g.J);
  CHECK(max_abs_diff(g.K, gs.minus * js.minus + gs.plus * js.plus) == 0.0);
  CHECK(max_abs_diff(g.L, gs.minus * js.plus + gs.plus * js.minus) == 0.0);
  const Matrix I = Matrix::identity(2);
  CHECK(g.A_x == block2x2(I - g.K1, g.L1, g.L1, I - g.K1));
  CHECK(max_abs_diff(g.M_f, g.A_x_pinv * g.A_f) == 0.0);
  CHECK(g.rank_minus == 2);
  CHECK(g.rank_plus == 1);
  CHECK_FALSE(g.exists);
  CHECK_FALSE(check_existence(g, 2));
  const FramerState st = initial_state(s.model);
  try {
    observer_step(s.model, g, st, Vector{0, 0}, Vector{0});
    FAIL("expected an existence failure");
  } catch (const ExistenceError& e) {
    CHECK(e.rank_minus() == 2);
    CHECK(e.rank_plus() == 1);
  }
}

TEST_CASE("rank-deficient H makes I - K1 + L1 singular") {
  // H v = 0 gives J1 G v = v, so G v is a fixed direction of I - G J1.
  Gen g(51);
  for (int t = 0; t < 50; ++t) {
    const Matrix G = g.matrix(2, 2);
    const Matrix H = g.low_rank(2, 2, 1);
    if (numeric_rank(vstack(G, H)) < 2) continue;
    SystemModel m = linear_model(Matrix{{0.1, 0}, {0, 0.1}}, Matrix::identity(2), G, H, 0.1);
    const ObserverGains gains = synthesize_gains(m);
    CHECK(gains.rank_plus < 2);
  }
}

TEST_CASE("existence check on hand-made gains") {
  ObserverGains g;
  g.K1 = Matrix::identity(2);
  g.L1 = Matrix(2, 2);
  CHECK_FALSE(check_existence(g, 2));
  g.K1 = Matrix(2, 2);
  CHECK(check_existence(g, 2));
  CHECK_THROWS_AS(check_existence(g, 3), DimensionError);
}

TEST_CASE("model validation") {
  SystemModel m = linear_model(Matrix{{0.5}}, Matrix{{1}}, Matrix{{0}}, Matrix{{0}}, 0.1);
  CHECK_THROWS_AS(synthesize_gains(m), DomainError);
  m.G = Matrix(2, 1);
  CHECK_THROWS_AS(synthesize_gains(m), DimensionError);
}

TEST_CASE("companion model: gain algebra and width identity") {
  const Scenario s = testing_support::companion_scenario();
  const SystemModel& m = s.model;
  const ObserverGains g = synthesize_gains(m);
  REQUIRE(g.exists);
  CHECK(g.inverse_nonnegative);
  const Matrix I = Matrix::identity(2);
  Gen gen(52);
  FramerState st = initial_state(m);
  for (int k = 0; k < 20; ++k) {
    const Vector y = gen.vector(2, -2, 2), u{0.0};
    const FieldBounds fb = nonlinear_bounds(m, st.x_box);
    const FramerState next = observer_step(m, g, st, y, u);
    const Vector s2 = concat(next.x_box.upper(), next.x_box.lower());
    auto stack = [](const IntervalVector& b) { return concat(b.upper(), b.lower()); };
    const Vector p = g.A_f * stack(fb.f) + g.A_g * stack(fb.g) + g.A_u * u + g.A_w * stack(m.w_bounds) +
                     g.A_v * stack(m.v_bounds) + g.A_y * y;
    CHECK(max_abs_diff(g.A_x * s2, p) < 1e-9);
    const Vector dx = next.x_box.width();
    const Vector lhs = (I - g.K1 - g.L1) * dx;
    const Vector rhs = (I + g.K1 + g.L1) * (fb.f.width() + m.w_bounds.width()) +
                       (g.K2 + g.L2) * (fb.g.width() + m.v_bounds.width());
    CHECK(max_abs_diff(lhs, rhs) < 1e-9);
    const TMatrices t = compute_T_matrices(g);
    CHECK(max_abs_diff(dx, t.T_f * (fb.f.width() + m.w_bounds.width()) + t.T_g * (fb.g.width() + m.v_bounds.width())) <
          1e-9);
    st = next;
  }
}

TEST_CASE("input bounds are tight") {
  const Scenario s = testing_support::companion_scenario();
  const ObserverGains g = synthesize_gains(s.model);
  Gen gen(53);
  for (int t = 0; t < 300; ++t) {
    const IntervalVector prev = gen.box(2, -2, 2, 2), cur = gen.box(2, -2, 2, 2);
    const Vector y = gen.vector(2, -3, 3);
    const InputEstimate e = estimate_input(s.model, g, cur, prev, y, Vector{0});
    const IntervalVector ref = vertex_oracle(g.J, e.h_lower, e.h_upper);
    CHECK(max_abs_diff(e.d_box.lower(), ref.lower()) < 1e-12);
    CHECK(max_abs_diff(e.d_box.upper(), ref.upper()) < 1e-12);
  }
}

TEST_CASE("point intervals give d = J h") {
  const Matrix A{{0.4, 0.1}, {0, 0.3}};
  SystemModel m = linear_model(A, Matrix::identity(2), Matrix{{1, 0}, {0, 0}}, Matrix{{0, 0}, {0, 1}}, 0.0);
  m.bounding.use_affine = false;
  const ObserverGains g = synthesize_gains(m);
  const Vector xp{0.3, -0.2}, xc{0.5, 0.1}, y{1.0, 2.0};
  const InputEstimate e = estimate_input(m, g, IntervalVector::point(xc), IntervalVector::point(xp), y, Vector{0});
  const Vector h = concat(xc, y) - concat(A * xp, xp);
  CHECK(max_abs_diff(e.h_upper, h) < 1e-14);
  CHECK(max_abs_diff(e.h_lower, h) < 1e-14);
  CHECK(max_abs_diff(e.d_box.upper(), g.J * h) < 1e-12);
  CHECK(max_abs_diff(e.d_box.lower(), g.J * h) < 1e-12);
}

TEST_CASE("framers contain states and arbitrary inputs") {
  const Scenario s = testing_support::companion_scenario();
  const SystemModel& m = s.model;
  const ObserverGains g = synthesize_gains(m);
  std::mt19937_64 rng(54);
  std::size_t violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Run r = simulate(m, rng, 100, 2.0 + trial);
    FramerState st = initial_state(m);
    for (std::size_t k = 1; k <= 100; ++k) {
      st = observer_step(m, g, st, r.y[k - 1], Vector{0});
      if (!contains(st.x_box, r.x[k])) ++violations;
      if (!contains(*st.d_box, r.d[k - 1])) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("propagation alone matches the composed step") {
  const Scenario s = testing_support::companion_scenario();
  const ObserverGains g = synthesize_gains(s.model);
  const FramerState st = initial_state(s.model);
  const Vector y{0.4, -0.3}, u{0};
  const FramerState a = observer_step(s.model, g, st, y, u);
  const FramerState b = observer_step(s.model, g, st, y, u);
  CHECK(a.x_box == b.x_box);
  CHECK(*a.d_box == *b.d_box);
  CHECK(a.k == 1);
  CHECK(propagate_state(s.model, g, st, y, u) == a.x_box);
  CHECK(estimate_input(s.model, g, a.x_box, st.x_box, y, u).d_box == *a.d_box);
}

TEST_CASE("noise-free widths shrink") {
  Scenario s = testing_support::companion_scenario();
  s.model.w_bounds = IntervalVector(Vector(2), Vector(2));
  s.model.v_bounds = IntervalVector(Vector(2), Vector(2));
  const ObserverGains g = synthesize_gains(s.model);
  FramerState st = initial_state(s.model);
  double w = width_norm(st.x_box);
  for (int k = 0; k < 10; ++k) {
    st = observer_step(s.model, g, st, Vector{0.1 * k, -0.2}, Vector{0});
    const double next = width_norm(st.x_box);
    CHECK(next < w);
    w = next;
  }
}

TEST_CASE("feedthrough decomposition") {
  const Matrix Hs{{-0.1, 0.3}, {0.25, -0.75}};
  const FeedthroughSvd a = decompose_feedthrough(Hs);
  CHECK(a.rank == 1);
  CHECK(max_abs_diff(a.U1 * a.Sigma * a.V1.transpose(), Hs) < 1e-9);
  const Matrix V = hstack(a.V1, a.V2);
  CHECK(max_abs_diff(V.transpose() * V, Matrix::identity(2)) < 1e-12);
  CHECK(max_abs_diff(a.Phi * a.Sigma, Matrix::identity(1)) < 1e-12);

  const FeedthroughSvd full = decompose_feedthrough(Matrix{{2, 0.3}, {0.25, 2}});
  CHECK(full.rank == 2);
  CHECK(full.U2.cols() == 0);
  CHECK(full.V2.cols() == 0);

  const FeedthroughSvd zero = decompose_feedthrough(Matrix(2, 2));
  CHECK(zero.rank == 0);
  SystemModel m = linear_model(Matrix{{0.5}}, Matrix{{1}}, Matrix{{1}}, Matrix{{0}}, 0.1);
  CHECK_FALSE(estimate_current_input_component(m, decompose_feedthrough(m.H), Vector{1}, Vector{0},
                                               IntervalVector::point(Vector{0})));
}

TEST_CASE("current-time input recovery is exact without uncertainty") {
  Gen gen(55);
  const Matrix C{{0.5, -0.2}, {0.1, 0.3}};
  SystemModel m = linear_model(Matrix{{0.2, 0}, {0, 0.2}}, C, Matrix{{0, -0.1}, {0.2, -0.2}},
                               Matrix{{2, 0.3}, {0.25, 2}}, 0.0);
  m.bounding.use_affine = false;
  const FeedthroughSvd svd = decompose_feedthrough(m.H);
  REQUIRE(svd.rank == 2);
  for (int t = 0; t < 100; ++t) {
    const Vector x = gen.vector(2, -2, 2), d = gen.vector(2, -3, 3);
    const Vector y = C * x + m.H * d;
    const auto est = estimate_current_input_component(m, svd, y, Vector{0}, IntervalVector::point(x));
    REQUIRE(est);
    const Vector truth = svd.V1.transpose() * d;
    CHECK(max_abs_diff(est->lower(), truth) < 1e-9);
    CHECK(max_abs_diff(est->upper(), truth) < 1e-9);
    CHECK(max_abs_diff(svd.V1 * truth, d) < 1e-9);
  }
}

TEST_CASE("current-time input interval contains the projected input") {
  const Scenario s = testing_support::reference_scenario();
  const FeedthroughSvd svd = decompose_feedthrough(s.model.H);
  Gen gen(56);
  std::size_t outside = 0;
  for (int t = 0; t < 2000; ++t) {
    const IntervalVector box = gen.box(2, -2, 2, 1.5);
    const Vector x = gen.point_in(box), d = gen.vector(2, -3, 3);
    const Vector v = gen.point_in(s.model.v_bounds);
    const Vector y = s.model.g(x) + s.model.H * d + v;
    const auto est = estimate_current_input_component(s.model, svd, y, Vector{0}, box);
    REQUIRE(est);
    REQUIRE(est->size() == 1);
    if (!contains(*est, svd.V1.transpose() * d)) ++outside;
  }
  CHECK(outside == 0);
}
