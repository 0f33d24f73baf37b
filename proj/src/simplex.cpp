#include "gsisio/simplex.hpp"

#include <cmath>
#include <limits>

#include "gsisio/errors.hpp"

namespace gsisio {

void LinearProgram::validate() const {
  if (constraints.cols() != objective.size()) {
    throw DimensionError("LinearProgram: constraint matrix has " +
                         std::to_string(constraints.cols()) + " columns for " +
                         std::to_string(objective.size()) + " variables");
  }
  if (constraints.rows() != rhs.size()) {
    throw DimensionError("LinearProgram: right-hand side size does not match constraint rows");
  }
  if (!free.empty() && free.size() != objective.size()) {
    throw DimensionError("LinearProgram: free-variable mask size does not match variable count");
  }
  if (!all_finite(objective) || !all_finite(rhs) || !constraints.all_finite()) {
    throw NumericError("LinearProgram: non-finite data");
  }
}

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau in equality form: rows_ constraints over `cols` columns plus a
// right-hand side column, with an explicit basis.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Objective row stored last; holds reduced costs and -objective value.
  double& cost(std::size_t c) { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Loads the reduced-cost row for cost vector c over the current basis.
  void price(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= cols_; ++j) cost(j) = j < cols_ ? c[j] : 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) cost(j) -= cb * at(r, j);
    }
  }

  // Bland's rule iterations; `allowed` masks columns that may enter.
  // Returns false on unboundedness.
  bool optimize(const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed[j] && cost(j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && leave < rows_ && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult simplex_solve(const LinearProgram& lp) {
  lp.validate();
  const std::size_t n = lp.variable_count();
  const std::size_t m = lp.constraints.rows();
  auto is_free = [&](std::size_t j) { return !lp.free.empty() && lp.free[j]; };

  // Column layout: structural columns (free variables split into +/-), one
  // slack per row, then one artificial per row with negative right-hand side.
  std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
  std::size_t col = 0;
  for (std::size_t j = 0; j < n; ++j) {
    pos_col[j] = col++;
    if (is_free(j)) neg_col[j] = col++;
  }
  const std::size_t slack0 = col;
  col += m;
  std::vector<std::size_t> art_col(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (lp.rhs[i] < 0.0) art_col[i] = col++;
  const std::size_t total = col;

  Tableau tab(m, total);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = lp.constraints(i, j);
      tab.at(i, pos_col[j]) = sign * a;
      if (neg_col[j] != SIZE_MAX) tab.at(i, neg_col[j]) = -sign * a;
    }
    tab.at(i, slack0 + i) = sign;
    tab.rhs(i) = sign * lp.rhs[i];
    if (art_col[i] != SIZE_MAX) {
      tab.at(i, art_col[i]) = 1.0;
      tab.basis()[i] = art_col[i];
    } else {
      tab.basis()[i] = slack0 + i;
    }
  }

  std::vector<bool> allowed(total, true);
  bool has_artificial = false;
  for (std::size_t i = 0; i < m; ++i) has_artificial |= art_col[i] != SIZE_MAX;

  if (has_artificial) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (art_col[i] != SIZE_MAX) phase1[art_col[i]] = 1.0;
    tab.price(phase1);
    tab.optimize(allowed);  // bounded below by zero
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(lp.rhs[i]));
    if (-tab.cost(total) > 1e-9 * scale) return {LpStatus::kInfeasible, {}, 0.0};

    // Drive remaining (zero-valued) artificials out of the basis.
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t b = tab.basis()[r];
      bool artificial = false;
      for (std::size_t i = 0; i < m; ++i) artificial |= art_col[i] == b;
      if (!artificial) continue;
      for (std::size_t j = 0; j < slack0 + m; ++j) {
        if (std::abs(tab.at(r, j)) > kPivotTol) {
          tab.pivot(r, j);
          break;
        }
      }
      // A row with no usable column is redundant; its artificial stays basic at zero.
    }
    for (std::size_t i = 0; i < m; ++i)
      if (art_col[i] != SIZE_MAX) allowed[art_col[i]] = false;
  }

  std::vector<double> phase2(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    phase2[pos_col[j]] = lp.objective[j];
    if (neg_col[j] != SIZE_MAX) phase2[neg_col[j]] = -lp.objective[j];
  }
  tab.price(phase2);
  if (!tab.optimize(allowed)) return {LpStatus::kUnbounded, {}, 0.0};

  std::vector<double> values(total, 0.0);
  for (std::size_t r = 0; r < m; ++r) values[tab.basis()[r]] = tab.rhs(r);
  LpResult out{LpStatus::kOptimal, Vector(n), 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    out.solution[j] = values[pos_col[j]] - (neg_col[j] != SIZE_MAX ? values[neg_col[j]] : 0.0);
  }
  out.objective = dot(lp.objective, out.solution);
  return out;
}

}  // namespace gsisio
