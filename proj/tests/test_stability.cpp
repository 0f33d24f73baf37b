#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fixtures.hpp"
#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"
#include "gsisio/simulation.hpp"
#include "gsisio/stability.hpp"
#include "support.hpp"

using namespace gsisio;
using testing_support::Gen;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

double eig_max(const Eigen::MatrixXd& s) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

// Hessian/2 of Q|ds|^2 + |T_f(dw+df) + T_g(dv+dg)|^2 - |T_f df|^2 - |T_g dg|^2.
Eigen::MatrixXd condition_ii_oracle(const Matrix& Tf_, const Matrix& Tg_, double Lf, double Lg) {
  const Eigen::MatrixXd Tf = to_eigen(Tf_), Tg = to_eigen(Tg_);
  const Eigen::Index n = Tf.rows(), l = Tg.cols(), N = 3 * n + 2 * l;
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, N);
  E.block(0, n, n, l) = Tg;
  E.block(0, n + l, n, n) = Tf;
  E.block(0, 2 * n + l, n, n) = Tf;
  E.block(0, 3 * n + l, n, l) = Tg;
  Eigen::MatrixXd M = E.transpose() * E;
  M.block(2 * n + l, 2 * n + l, n, n) -= Tf.transpose() * Tf;
  M.block(3 * n + l, 3 * n + l, l, l) -= Tg.transpose() * Tg;
  const double Q = eig_max(Tf.transpose() * Tf) * Lf * Lf + eig_max(Tg.transpose() * Tg) * Lg * Lg - 1.0;
  M.block(0, 0, n, n) = Q * Eigen::MatrixXd::Identity(n, n);
  return M;
}

Matrix random_spd(Gen& g, std::size_t n, double shift) {
  const Matrix a = g.matrix(n, n);
  return a * a.transpose() + shift * Matrix::identity(n);
}

ObserverGains zero_gains(std::size_t n, std::size_t l, std::size_t p) {
  ObserverGains g;
  g.K1 = Matrix(n, n);
  g.L1 = Matrix(n, n);
  g.K2 = Matrix(n, l);
  g.L2 = Matrix(n, l);
  g.J = Matrix(p, n + l);
  return g;
}

}  // namespace

TEST_CASE("T matrices") {
  const TMatrices z = compute_T_matrices(zero_gains(2, 3, 2));
  CHECK(max_abs_diff(z.T_f, Matrix::identity(2)) == 0.0);
  CHECK(z.T_g.rows() == 2);
  CHECK(z.T_g.cols() == 3);
  CHECK(z.T_g.max_abs() == 0.0);

  const Scenario s = testing_support::companion_scenario();
  const ObserverGains g = synthesize_gains(s.model);
  const TMatrices t = compute_T_matrices(g);
  const Matrix I = Matrix::identity(2);
  CHECK(max_abs_diff((I - g.K1 - g.L1) * t.T_f, I + g.K1 + g.L1) < 1e-12);
  CHECK(max_abs_diff((I - g.K1 - g.L1) * t.T_g, g.K2 + g.L2) < 1e-12);
}

TEST_CASE("condition (i) arithmetic") {
  const Matrix I = Matrix::identity(2);
  const ConditionI a = condition_i(I, Matrix(2, 1), 0.5, 3.0);
  CHECK(a.contraction == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(a.ok);
  const ConditionI b = condition_i(1.1 * I, Matrix{{1}, {0}}, 1.0, 0.0);
  CHECK(b.contraction == doctest::Approx(1.1).epsilon(1e-14));
  CHECK_FALSE(b.ok);
  CHECK(condition_i(I, Matrix{{0}, {0}}, 1.0, 0.0).ok);
  CHECK_THROWS_AS(condition_i(I, Matrix(2, 1), -1.0, 0.0), DomainError);
  Gen gen(61);
  for (int t = 0; t < 100; ++t) {
    const Matrix Tf = gen.matrix(3, 3), Tg = gen.matrix(3, 2);
    const double Lf = gen.uniform(0, 2), Lg = gen.uniform(0, 2);
    const double ref = Lf * to_eigen(Tf).jacobiSvd().singularValues()(0) + Lg * to_eigen(Tg).jacobiSvd().singularValues()(0);
    CHECK(std::abs(condition_i(Tf, Tg, Lf, Lg).contraction - ref) < 1e-10 * (1 + ref));
  }
}

TEST_CASE("condition (ii) matrix matches the quadratic-form oracle") {
  Gen gen(62);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = gen.index(1, 4), l = gen.index(1, 3);
    const Matrix Tf = gen.matrix(n, n), Tg = gen.matrix(n, l);
    const double Lf = gen.uniform(0, 1.5), Lg = gen.uniform(0, 1.5);
    const ConditionII c = condition_ii(Tf, Tg, Lf, Lg);
    const Eigen::MatrixXd ref = condition_ii_oracle(Tf, Tg, Lf, Lg);
    CHECK((to_eigen(c.matrix) - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(asymmetry(c.matrix) == 0.0);
    const double lm = eig_max(ref);
    CHECK(std::abs(c.lambda_max - lm) < 1e-9 * (1 + std::abs(lm)));
    CHECK(c.ok == (lm <= 1e-9));
  }
}

TEST_CASE("condition (ii) small cases") {
  // T_f = T_g = 0: the form is -|ds|^2.
  const ConditionII z = condition_ii(Matrix(1, 1), Matrix(1, 1), 1.0, 1.0);
  CHECK(z.Q == -1.0);
  CHECK(z.ok);
  CHECK(z.lambda_max == doctest::Approx(0.0));
  // Any nonzero T_f leaves an indefinite (dw, df) block.
  const ConditionII c = condition_ii(Matrix{{0.1}}, Matrix{{0}}, 0.1, 0.0);
  CHECK_FALSE(c.ok);
  CHECK(c.lambda_max > 0.0);
  CHECK_THROWS_AS(condition_ii(Matrix(2, 1), Matrix(2, 1), 1, 1), DimensionError);
}

TEST_CASE("condition (iii) assembly and search") {
  const Matrix I = Matrix::identity(2);
  CHECK_THROWS_AS(assemble_condition_iii_matrix(0.5, Matrix(2, 2), I), DomainError);
  CHECK_THROWS_AS(assemble_condition_iii_matrix(0.5, I, -1.0 * I), DomainError);
  CHECK_THROWS_AS(assemble_condition_iii_matrix(0.5, Matrix{{1, 0.5}, {0, 1}}, I), DomainError);
  CHECK_THROWS_AS(assemble_condition_iii_matrix(0.5, I, Matrix::identity(3)), DimensionError);

  const Matrix P{{0.25}}, Gm{{0.25}};
  Eigen::MatrixXd ref(3, 3);
  ref << -0.5, 0, 0.25, 0, -0.25, 0, 0.25, 0, 0.25;
  CHECK((to_eigen(assemble_condition_iii_matrix(0.0, P, Gm)) - ref).cwiseAbs().maxCoeff() == 0.0);
  CHECK(verify_condition_iii(0.0, P, Gm) == (eig_max(ref) <= 1e-9));

  Gen gen(63);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = gen.index(1, 3);
    const Matrix Pn = random_spd(gen, n, 1e-3);
    const Matrix Gn = gen.coin() ? Matrix(n, n) : random_spd(gen, n, 0.0);
    const double c = gen.uniform(0, 2);
    const Eigen::MatrixXd M = to_eigen(assemble_condition_iii_matrix(c, Pn, Gn));
    CHECK(verify_condition_iii(c, Pn, Gn) == (eig_max(M) <= 1e-9));
    // The (3,3) block is P itself, so no P > 0 can pass.
    CHECK_FALSE(verify_condition_iii(c, Pn, Gn));
  }

  const ConditionIII r = condition_iii(0.3, 2);
  CHECK_FALSE(r.ok);
  CHECK(r.points_checked == 2500);
  CHECK_FALSE(r.P);
  ConditionIIIGrid bad;
  bad.p_min = 0.0;
  CHECK_THROWS_AS(condition_iii(0.3, 2, bad), DomainError);
}

TEST_CASE("width sequences") {
  const Scenario s = testing_support::companion_scenario();
  const ObserverGains g = synthesize_gains(s.model);
  const Vector dw = s.model.w_bounds.width(), dv = s.model.v_bounds.width();

  const WidthBounds zero = width_bound_sequences(0.6, g, 0.2, 0.1, Vector(2), Vector(2), 3.0, 30);
  CHECK(zero.delta_z_norm == 0.0);
  for (std::size_t k = 0; k <= 30; ++k) CHECK(zero.delta_x[k] == doctest::Approx(3.0 * std::pow(0.6, k)).epsilon(1e-13));

  const WidthBounds w = width_bound_sequences(0.7, g, 0.2, 0.1, dw, dv, 2.5, 1000);
  CHECK(w.delta_x[0] == 2.5);
  REQUIRE(w.delta_x.size() == 1001);
  REQUIRE(w.delta_d.size() == 1000);
  double rec = 2.5;
  for (std::size_t k = 1; k <= 1000; ++k) {
    rec = 0.7 * rec + w.delta_z_norm;
    CHECK(std::abs(w.delta_x[k] - rec) <= 1e-12 * std::max(1.0, rec));
    CHECK(w.delta_d[k - 1] == doctest::Approx(w.input_map(std::max(w.delta_x[k], w.delta_x[k - 1]))));
  }
  REQUIRE(w.steady_x);
  CHECK(std::abs(w.delta_x[1000] - *w.steady_x) < 1e-12 * *w.steady_x);
  CHECK(*w.steady_d == doctest::Approx(w.input_map(*w.steady_x)));

  const TMatrices t = compute_T_matrices(g);
  const Eigen::VectorXd dz = to_eigen(t.T_f) * Eigen::Vector2d(dw[0], dw[1]) + to_eigen(t.T_g) * Eigen::Vector2d(dv[0], dv[1]);
  CHECK(w.delta_z_norm == doctest::Approx(dz.norm()).epsilon(1e-14));

  const WidthBounds lin = width_bound_sequences(1.0, g, 0.2, 0.1, dw, dv, 1.0, 50);
  for (std::size_t k = 0; k <= 50; ++k)
    CHECK(lin.delta_x[k] == doctest::Approx(1.0 + k * lin.delta_z_norm).epsilon(1e-13));
  CHECK_FALSE(lin.steady_x);
  CHECK_THROWS_AS(width_bound_sequences(-0.1, g, 0.2, 0.1, dw, dv, 1.0, 5), DomainError);
  CHECK_THROWS_AS(width_bound_sequences(0.5, g, 0.2, 0.1, Vector(3), dv, 1.0, 5), DimensionError);
}

TEST_CASE("steady-state bounds") {
  const InputWidthMap G{2.0, 0.5};
  const auto s = steady_state_bounds(0.5, 1.0, G);
  REQUIRE(s);
  CHECK(s->steady_x == doctest::Approx(2.0));
  CHECK(s->steady_x_printed == doctest::Approx(1.0));
  CHECK(s->steady_d == doctest::Approx(4.5));
  CHECK_FALSE(steady_state_bounds(1.0, 1.0, G));
  CHECK_FALSE(steady_state_bounds(1.5, 1.0, G));
}

TEST_CASE("widths stay uniformly bounded on the companion model") {
  const Scenario s = testing_support::companion_scenario();
  const ObserverSetup setup = prepare_observer(s, 1000);
  REQUIRE(setup.contraction < 1.0);
  const RunTrace trace = run_observer(s, setup, simulate_ground_truth(s, 64, 1000));
  const TraceCheck c = check_trace(trace);
  CHECK(c.state_violations == 0);
  CHECK(c.input_violations == 0);
  CHECK(c.domination_failures == 0);
  CHECK(c.max_width_x <= std::max(setup.widths.delta_x[0], *setup.widths.steady_x) + 1e-9);
  CHECK(c.max_width_d <= setup.widths.input_map(std::max(setup.widths.delta_x[0], *setup.widths.steady_x)) + 1e-9);
}

TEST_CASE("stability report on the reference model") {
  const Scenario s = testing_support::reference_scenario();
  const ObserverGains g = synthesize_gains(s.model);
  const double Lf = lipschitz_like_constant(build_decomposition(s.model.f));
  const double Lg = lipschitz_like_constant(build_decomposition(s.model.g));
  const StabilityReport r = assess_stability(g, 2, Lf, Lg);
  CHECK(r.cond_i.contraction > 1.0);
  CHECK_FALSE(r.cond_i.ok);
  CHECK_FALSE(r.cond_ii.ok);
  CHECK_FALSE(r.cond_iii.ok);
}
