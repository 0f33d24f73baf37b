#include "gsisio/stability.hpp"

#include <algorithm>
#include <cmath>

#include "gsisio/errors.hpp"
#include "gsisio/linalg.hpp"

namespace gsisio {

TMatrices compute_T_matrices(const ObserverGains& gains) {
  const std::size_t n = gains.K1.rows();
  const Matrix I = Matrix::identity(n);
  const Matrix inv = pinv(I - gains.K1 - gains.L1);
  return {inv * (I + gains.K1 + gains.L1), inv * (gains.K2 + gains.L2)};
}

ConditionI condition_i(const Matrix& T_f, const Matrix& T_g, double L_fd, double L_gd) {
  if (!(L_fd >= 0.0) || !(L_gd >= 0.0)) throw DomainError("condition_i: Lipschitz constants must be >= 0");
  const double c = L_fd * spectral_norm(T_f) + L_gd * spectral_norm(T_g);
  return {c <= 1.0, c};
}

Matrix assemble_condition_ii_matrix(const Matrix& T_f, const Matrix& T_g, double L_fd, double L_gd) {
  const std::size_t n = T_f.rows(), l = T_g.cols();
  if (T_f.cols() != n || T_g.rows() != n) throw DimensionError("condition_ii: T_f must be n x n and T_g n x l");
  const Matrix ff = T_f.transpose() * T_f;
  const Matrix gg = T_g.transpose() * T_g;
  const Matrix gf = T_g.transpose() * T_f;  // l x n
  const Matrix fg = T_f.transpose() * T_g;  // n x l
  const double Q = sym_eig_extrema(ff).max * L_fd * L_fd + sym_eig_extrema(gg).max * L_gd * L_gd - 1.0;

  const std::size_t off[5] = {0, n, n + l, 2 * n + l, 3 * n + l};
  Matrix T(3 * n + 2 * l, 3 * n + 2 * l);
  auto put = [&](std::size_t bi, std::size_t bj, const Matrix& m) {
    T.set_block(off[bi], off[bj], m);
    if (bi != bj) T.set_block(off[bj], off[bi], m.transpose());
  };
  put(0, 0, Q * Matrix::identity(n));
  put(1, 1, gg);
  put(1, 2, gf);
  put(1, 3, gf);
  put(1, 4, gg);
  put(2, 2, ff);
  put(2, 3, ff);
  put(2, 4, fg);
  put(3, 4, fg);
  return T;
}

ConditionII condition_ii(const Matrix& T_f, const Matrix& T_g, double L_fd, double L_gd) {
  ConditionII out;
  out.matrix = assemble_condition_ii_matrix(T_f, T_g, L_fd, L_gd);
  out.Q = out.matrix(0, 0);
  out.lambda_max = sym_eig_extrema(out.matrix).max;
  out.ok = out.lambda_max <= 1e-9;
  return out;
}

Matrix assemble_condition_iii_matrix(double contraction, const Matrix& P, const Matrix& Gamma) {
  const std::size_t n = P.rows();
  if (!P.is_square() || Gamma.rows() != n || Gamma.cols() != n)
    throw DimensionError("condition_iii: P and Gamma must be n x n");
  if (!(contraction >= 0.0)) throw DomainError("condition_iii: contraction constant must be >= 0");
  if (asymmetry(P) > 1e-12 || asymmetry(Gamma) > 1e-12)
    throw DomainError("condition_iii: P and Gamma must be symmetric");
  if (sym_eig_extrema(P).min <= 0.0) throw DomainError("condition_iii: P must be positive definite");
  if (sym_eig_extrema(Gamma).min < 0.0) throw DomainError("condition_iii: Gamma must be positive semidefinite");
  const Matrix I = Matrix::identity(n);
  const Matrix Z(n, n);
  Matrix out(3 * n, 3 * n);
  out.set_block(0, 0, P + Gamma - I);
  out.set_block(0, 2 * n, P);
  out.set_block(n, n, contraction * contraction * I - P);
  out.set_block(2 * n, 0, P);
  out.set_block(2 * n, 2 * n, P);
  return out;
}

bool verify_condition_iii(double contraction, const Matrix& P, const Matrix& Gamma) {
  return is_negative_semidefinite(assemble_condition_iii_matrix(contraction, P, Gamma), 1e-9);
}

ConditionIII condition_iii(double contraction, std::size_t n, const ConditionIIIGrid& grid) {
  if (grid.p_count == 0 || grid.gamma_count == 0 || !(grid.p_min > 0.0) || grid.p_max < grid.p_min ||
      grid.gamma_min < 0.0 || grid.gamma_max < grid.gamma_min) {
    throw DomainError("condition_iii: invalid search grid");
  }
  ConditionIII out;
  const Matrix I = Matrix::identity(n);
  for (std::size_t a = 0; a < grid.p_count; ++a) {
    const double t = grid.p_count == 1 ? 0.0 : static_cast<double>(a) / static_cast<double>(grid.p_count - 1);
    const double p = std::exp(std::log(grid.p_min) + t * (std::log(grid.p_max) - std::log(grid.p_min)));
    for (std::size_t b = 0; b < grid.gamma_count; ++b) {
      const double s = grid.gamma_count == 1 ? 0.0 : static_cast<double>(b) / static_cast<double>(grid.gamma_count - 1);
      const double gamma = grid.gamma_min + s * (grid.gamma_max - grid.gamma_min);
      ++out.points_checked;
      if (verify_condition_iii(contraction, p * I, gamma * I)) {
        out.ok = true;
        out.P = p * I;
        out.Gamma = gamma * I;
        return out;
      }
    }
  }
  return out;
}

WidthBounds width_bound_sequences(double contraction, const ObserverGains& gains, double L_fd, double L_gd,
                                  const Vector& dw, const Vector& dv, double delta0, std::size_t horizon) {
  if (!(contraction >= 0.0) || !std::isfinite(contraction))
    throw DomainError("width_bound_sequences: contraction constant must be finite and >= 0");
  if (!(delta0 >= 0.0)) throw DomainError("width_bound_sequences: initial width must be >= 0");
  const std::size_t n = gains.K1.rows(), l = gains.K2.cols();
  if (dw.size() != n || dv.size() != l) throw DimensionError("width_bound_sequences: noise width sizes");

  const TMatrices t = compute_T_matrices(gains);
  WidthBounds out;
  out.delta_z_norm = norm(t.T_f * dw + t.T_g * dv);
  const Matrix J_hat = abs_matrix(gains.J);
  out.J_hat_1 = J_hat.columns(0, n);
  out.J_hat_2 = J_hat.columns(n, l);
  out.input_map.slope = (1.0 + L_fd) * spectral_norm(out.J_hat_1) + L_gd * spectral_norm(out.J_hat_2);
  out.input_map.offset = norm(out.J_hat_1 * dw + out.J_hat_2 * dv);

  out.delta_x.resize(horizon + 1);
  const double dz = out.delta_z_norm;
  for (std::size_t k = 0; k <= horizon; ++k) {
    const double kk = static_cast<double>(k);
    if (contraction == 1.0) {
      out.delta_x[k] = delta0 + kk * dz;
    } else {
      const double lk = std::pow(contraction, kk);
      const double geom = (1.0 - lk) / (1.0 - contraction);
      out.delta_x[k] = lk * delta0 + (dz == 0.0 ? 0.0 : dz * geom);
    }
  }
  out.delta_d.resize(horizon);
  for (std::size_t k = 1; k <= horizon; ++k)
    out.delta_d[k - 1] = out.input_map(std::max(out.delta_x[k], out.delta_x[k - 1]));

  if (auto ss = steady_state_bounds(contraction, dz, out.input_map)) {
    out.steady_x = ss->steady_x;
    out.steady_d = ss->steady_d;
  }
  return out;
}

std::optional<SteadyState> steady_state_bounds(double contraction, double delta_z_norm, const InputWidthMap& g) {
  if (!(contraction < 1.0)) return std::nullopt;
  SteadyState s;
  s.steady_x = delta_z_norm / (1.0 - contraction);
  s.steady_x_printed = delta_z_norm * contraction / (1.0 - contraction);
  s.steady_d = g(s.steady_x);
  return s;
}

StabilityReport assess_stability(const ObserverGains& gains, std::size_t n, double L_fd, double L_gd,
                                 const ConditionIIIGrid& grid) {
  StabilityReport r;
  const TMatrices t = compute_T_matrices(gains);
  r.T_f = t.T_f;
  r.T_g = t.T_g;
  r.L_fd = L_fd;
  r.L_gd = L_gd;
  r.cond_i = condition_i(t.T_f, t.T_g, L_fd, L_gd);
  r.cond_ii = condition_ii(t.T_f, t.T_g, L_fd, L_gd);
  r.cond_iii = condition_iii(r.cond_i.contraction, n, grid);
  return r;
}

}  // namespace gsisio
