#pragma once

#include <vector>

#include "gsisio/matrix.hpp"

namespace gsisio {

/// minimize c^T x  subject to  A x <= b,  x_j >= 0 unless free[j].
struct LinearProgram {
  Vector objective;
  Matrix constraints;
  Vector rhs;
  std::vector<bool> free;  // empty means every variable is non-negative

  std::size_t variable_count() const { return objective.size(); }
  /// Throws DimensionError when the pieces disagree.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector solution;
  double objective = 0.0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

/// Two-phase dense-tableau simplex with Bland's rule (no cycling).
LpResult simplex_solve(const LinearProgram& lp);

}  // namespace gsisio
