#pragma once

#include <optional>

#include "gsisio/interval.hpp"
#include "gsisio/matrix.hpp"
#include "gsisio/mixed_monotone.hpp"

namespace gsisio {

enum class SigmaPolicy {
  kLipschitz,  // sigma_i = L_i * half diagonal of the current box
  kFixed,      // sigma taken verbatim from BoundingOptions
};

/// How f and g are bounded over a box each step.
struct BoundingOptions {
  bool use_affine = true;  // meet decomposition bounds with an affine abstraction
  SigmaPolicy sigma_policy = SigmaPolicy::kLipschitz;
  Vector sigma_f;
  Vector sigma_g;
};

/// x_{k+1} = f(x_k) + B u_k + G d_k + w_k,  y_k = g(x_k) + D u_k + H d_k + v_k.
struct SystemModel {
  std::size_t n = 0, m = 0, p = 0, l = 0;
  NonlinearField f;
  NonlinearField g;
  Matrix B, D, G, H;
  IntervalVector w_bounds;
  IntervalVector v_bounds;
  IntervalVector x0_bounds;
  BoundingOptions bounding;

  /// Shapes, field data, and full column rank of [G; H].
  void validate() const;
};

struct ObserverGains {
  Matrix J;
  Matrix N11, N12, N21, N22;
  Matrix K, L;
  Matrix K1, K2, L1, L2;
  Matrix F;
  Matrix A_x, A_f, A_g, A_u, A_w, A_v, A_y;
  Matrix A_x_pinv;
  Matrix M_f, M_g, M_u, M_w, M_v, M_y;
  int rank_minus = 0;  // rk(I - K1 - L1)
  int rank_plus = 0;   // rk(I - K1 + L1)
  bool exists = false;
  /// [[I-K1, -L1], [-L1, I-K1]] is invertible with an entrywise non-negative inverse.
  bool inverse_nonnegative = false;
};

/// Relative singular-value cutoff used for the existence ranks.
inline constexpr double kExistenceRankTolerance = 1e-9;

ObserverGains synthesize_gains(const SystemModel& model);

/// rk(I - K1 - L1) == rk(I - K1 + L1) == n.
bool check_existence(const ObserverGains& gains, std::size_t n);

struct FieldBounds {
  IntervalVector f;
  IntervalVector g;
};

/// Bounds of f and g over a box (decomposition, optionally met with the affine abstraction).
FieldBounds nonlinear_bounds(const SystemModel& model, const IntervalVector& box);

struct FramerState {
  std::size_t k = 0;
  IntervalVector x_box;
  std::optional<IntervalVector> d_box;  // bounds on d_{k-1}
  Vector h_upper;
  Vector h_lower;
};

FramerState initial_state(const SystemModel& model);

/// State framers at k from those at k-1. Throws ExistenceError when the gains
/// fail the existence test and NumericError on inverted bounds.
IntervalVector propagate_state(const SystemModel& model, const ObserverGains& gains,
                               const FramerState& prev, const Vector& y_prev, const Vector& u_prev);

struct InputEstimate {
  IntervalVector d_box;
  Vector h_upper;
  Vector h_lower;
};

/// [N11 h_up + N12 h_lo, N21 h_up + N22 h_lo], the tight range of J h.
IntervalVector input_bounds_from_h(const ObserverGains& gains, const Vector& h_lower, const Vector& h_upper);

/// Bounds on d_{k-1} from the state boxes at k and k-1.
InputEstimate estimate_input(const SystemModel& model, const ObserverGains& gains,
                             const IntervalVector& cur_x_box, const IntervalVector& prev_x_box,
                             const Vector& y_prev, const Vector& u_prev);

FramerState observer_step(const SystemModel& model, const ObserverGains& gains, const FramerState& prev,
                          const Vector& y_prev, const Vector& u_prev);

/// H = U1 Sigma V1^T with the null directions in U2, V2.
struct FeedthroughSvd {
  std::size_t rank = 0;
  Matrix U1, U2;
  Matrix Sigma;
  Matrix V1, V2;
  Matrix T1, T2;
  Matrix Phi;
};

FeedthroughSvd decompose_feedthrough(const Matrix& H);

/// Bounds on V1^T d_k from y_k, u_k and the state box at k; nullopt when H = 0.
std::optional<IntervalVector> estimate_current_input_component(const SystemModel& model,
                                                               const FeedthroughSvd& svd, const Vector& y_k,
                                                               const Vector& u_k, const IntervalVector& x_box_k);

}  // namespace gsisio
