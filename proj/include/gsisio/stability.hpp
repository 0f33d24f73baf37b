#pragma once

#include <optional>
#include <vector>

#include "gsisio/matrix.hpp"
#include "gsisio/observer.hpp"

namespace gsisio {

struct TMatrices {
  Matrix T_f;  // (I-K1-L1)^+ (I+K1+L1)
  Matrix T_g;  // (I-K1-L1)^+ (K2+L2)
};

TMatrices compute_T_matrices(const ObserverGains& gains);

struct ConditionI {
  bool ok = false;
  double contraction = 0.0;
};

/// L = L_fd ||T_f|| + L_gd ||T_g||; ok iff L <= 1.
ConditionI condition_i(const Matrix& T_f, const Matrix& T_g, double L_fd, double L_gd);

struct ConditionII {
  bool ok = false;
  double lambda_max = 0.0;
  double Q = 0.0;
  Matrix matrix;
};

/// Symmetric block matrix over [ds (n), dv (l), dw (n), df (n), dg (l)] with
/// (1,1) block Q I_n.
Matrix assemble_condition_ii_matrix(const Matrix& T_f, const Matrix& T_g, double L_fd, double L_gd);

/// ok iff lambda_max <= 1e-9.
ConditionII condition_ii(const Matrix& T_f, const Matrix& T_g, double L_fd, double L_gd);

/// [[P + Gamma - I, 0, P], [0, L^2 I - P, 0], [P, 0, P]]. Throws DomainError if
/// P is not positive definite or Gamma is not positive semidefinite.
Matrix assemble_condition_iii_matrix(double contraction, const Matrix& P, const Matrix& Gamma);

/// True iff the assembled matrix is negative semidefinite (tolerance 1e-9).
bool verify_condition_iii(double contraction, const Matrix& P, const Matrix& Gamma);

struct ConditionIIIGrid {
  double p_min = 1e-3;
  double p_max = 1e3;
  std::size_t p_count = 50;  // log-spaced
  double gamma_min = 0.0;
  double gamma_max = 1.0;
  std::size_t gamma_count = 50;  // linear
};

struct ConditionIII {
  bool ok = false;  // false means "no witness on the grid"
  std::optional<Matrix> P;
  std::optional<Matrix> Gamma;
  std::size_t points_checked = 0;
};

/// Searches P = p I, Gamma = gamma I; the first feasible point in grid order wins.
ConditionIII condition_iii(double contraction, std::size_t n, const ConditionIIIGrid& grid = {});

/// G(x) = slope * x + offset.
struct InputWidthMap {
  double slope = 0.0;
  double offset = 0.0;
  double operator()(double x) const { return slope * x + offset; }
};

struct WidthBounds {
  std::vector<double> delta_x;  // k = 0..horizon
  std::vector<double> delta_d;  // entry k-1 bounds the input width at k-1, k = 1..horizon
  double delta_z_norm = 0.0;
  Matrix J_hat_1, J_hat_2;
  InputWidthMap input_map;
  std::optional<double> steady_x;
  std::optional<double> steady_d;
};

/// delta_x[k] = L^k d0 + ||dz|| (1 - L^k) / (1 - L)  (d0 + k ||dz|| when L = 1),
/// delta_d[k-1] = G(max(delta_x[k], delta_x[k-1])).
WidthBounds width_bound_sequences(double contraction, const ObserverGains& gains, double L_fd, double L_gd,
                                  const Vector& dw, const Vector& dv, double delta0, std::size_t horizon);

struct SteadyState {
  double steady_x = 0.0;         // ||dz|| / (1 - L)
  double steady_x_printed = 0.0;  // ||dz|| L / (1 - L), reported only
  double steady_d = 0.0;          // G(steady_x)
};

/// nullopt when L >= 1.
std::optional<SteadyState> steady_state_bounds(double contraction, double delta_z_norm, const InputWidthMap& g);

struct StabilityReport {
  Matrix T_f, T_g;
  double L_fd = 0.0, L_gd = 0.0;
  ConditionI cond_i;
  ConditionII cond_ii;
  ConditionIII cond_iii;
};

StabilityReport assess_stability(const ObserverGains& gains, std::size_t n, double L_fd, double L_gd,
                                 const ConditionIIIGrid& grid = {});

}  // namespace gsisio
