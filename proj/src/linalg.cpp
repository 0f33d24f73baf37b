#include "gsisio/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gsisio/errors.hpp"

namespace gsisio {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const Matrix& m, const char* op) {
  if (!m.all_finite()) throw NumericError(std::string(op) + ": non-finite matrix entry");
}

// Accepts a candidate column into the orthonormal set `basis` if it keeps a
// substantial component after two rounds of Gram-Schmidt.
bool orthonormalize_into(std::vector<Vector>& basis, Vector v) {
  const double original = norm(v);
  if (original == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& b : basis) {
      const double c = dot(b, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  }
  const double r = norm(v);
  if (r < 0.5 * original) return false;
  v *= 1.0 / r;
  basis.push_back(std::move(v));
  return true;
}

// One-sided Jacobi for rows >= cols.
SvdResult svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix w = a;
  Matrix v = Matrix::identity(n);

  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kEps * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw NumericError("svd: one-sided Jacobi did not converge in 100 sweeps");

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(w.col(j));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult out;
  out.singular_values = Vector(n);
  out.V = Matrix(n, n);
  std::vector<Vector> ucols;
  std::vector<std::size_t> missing;  // positions whose U column must be completed
  std::vector<Vector> placed(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) out.V(i, k) = v(i, j);
    bool ok = false;
    if (sigma[j] > 0.0) {
      Vector u = w.col(j);
      u *= 1.0 / sigma[j];
      ok = orthonormalize_into(ucols, u);
    }
    if (ok) {
      placed[k] = ucols.back();
    } else {
      missing.push_back(k);
    }
  }
  // Complete the basis greedily with the coordinate direction that keeps the
  // largest residual; that residual is at least sqrt((m - k) / m).
  std::vector<Vector> completion;
  while (ucols.size() < m) {
    Vector best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < m; ++e) {
      Vector cand(m);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const Vector& b : ucols) cand -= dot(b, cand) * b;
      const double r = norm(cand);
      if (r > best_norm) {
        best_norm = r;
        best = std::move(cand);
      }
    }
    best *= 1.0 / best_norm;
    ucols.push_back(best);
    completion.push_back(std::move(best));
  }
  out.U = Matrix(m, m);
  std::size_t next = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vector& col = std::find(missing.begin(), missing.end(), k) != missing.end()
                            ? completion.at(next++)
                            : placed[k];
    for (std::size_t i = 0; i < m; ++i) out.U(i, k) = col[i];
  }
  for (std::size_t k = n; k < m; ++k) {
    const Vector& col = completion.at(next++);
    for (std::size_t i = 0; i < m; ++i) out.U(i, k) = col[i];
  }
  return out;
}

double sigma_threshold(const Vector& s, double rel_tol) {
  return s.empty() ? 0.0 : rel_tol * s[0];
}

}  // namespace

SignSplit sign_split(const Matrix& m) { return {positive_part(m), negative_part(m)}; }

Matrix positive_part(const Matrix& m) {
  require_finite(m, "sign_split");
  Matrix p(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) p(i, j) = std::max(m(i, j), 0.0);
  return p;
}

Matrix negative_part(const Matrix& m) {
  require_finite(m, "sign_split");
  Matrix n(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) n(i, j) = std::max(-m(i, j), 0.0);
  return n;
}

Matrix abs_matrix(const Matrix& m) {
  require_finite(m, "abs_matrix");
  Matrix a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = std::abs(m(i, j));
  return a;
}

Matrix SvdResult::reconstruct() const {
  const std::size_t k = singular_values.size();
  Matrix out(U.rows(), V.rows());
  for (std::size_t i = 0; i < U.rows(); ++i)
    for (std::size_t j = 0; j < V.rows(); ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += U(i, t) * singular_values[t] * V(j, t);
      out(i, j) = s;
    }
  return out;
}

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdResult t = svd_tall(m.transpose());
  return {std::move(t.V), std::move(t.singular_values), std::move(t.U)};
}

double default_rank_tolerance(const Matrix& m) {
  return static_cast<double>(std::max<std::size_t>({1, m.rows(), m.cols()})) * kEps;
}

Matrix pinv(const Matrix& m) { return pinv(m, default_rank_tolerance(m)); }

Matrix pinv(const Matrix& m, double rel_tol) {
  if (!(rel_tol > 0.0)) throw DomainError("pinv: tolerance must be positive");
  const SvdResult d = svd(m);
  const double cut = sigma_threshold(d.singular_values, rel_tol);
  Matrix p(m.cols(), m.rows());
  for (std::size_t t = 0; t < d.singular_values.size(); ++t) {
    const double s = d.singular_values[t];
    if (!(s > cut)) continue;
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const double vi = d.V(i, t) / s;
      for (std::size_t j = 0; j < m.rows(); ++j) p(i, j) += vi * d.U(j, t);
    }
  }
  return p;
}

int numeric_rank(const Matrix& m) { return numeric_rank(m, default_rank_tolerance(m)); }

int numeric_rank(const Matrix& m, double rel_tol) {
  if (!(rel_tol > 0.0)) throw DomainError("numeric_rank: tolerance must be positive");
  if (m.empty()) return 0;
  const Vector s = svd(m).singular_values;
  const double cut = sigma_threshold(s, rel_tol);
  return static_cast<int>(std::count_if(s.begin(), s.end(), [&](double x) { return x > cut; }));
}

double spectral_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  return svd(m).singular_values[0];
}

double asymmetry(const Matrix& s) {
  if (!s.is_square()) throw DimensionError("asymmetry: matrix is not square");
  double a = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = i + 1; j < s.cols(); ++j) a = std::max(a, std::abs(s(i, j) - s(j, i)));
  return a;
}

SymmetricEigen sym_eig(const Matrix& s) {
  require_finite(s, "sym_eig");
  if (!s.is_square()) throw DimensionError("sym_eig: matrix is not square");
  if (asymmetry(s) > 1e-12 * std::max(1.0, s.max_abs())) {
    throw DomainError("sym_eig: matrix is not symmetric");
  }
  const std::size_t n = s.rows();
  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::identity(n);

  auto off_norm = [&]() {
    double o = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) o += a(i, j) * a(i, j);
    return std::sqrt(o);
  };
  const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= kEps * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_norm() > kEps * scale) {
    throw NumericError("sym_eig: Jacobi iteration did not converge in 100 sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

EigenExtrema sym_eig_extrema(const Matrix& s) {
  if (s.empty()) throw DimensionError("sym_eig_extrema: empty matrix");
  const Vector values = sym_eig(s).values;
  return {values[0], values[values.size() - 1]};
}

bool is_negative_semidefinite(const Matrix& s, double tol) {
  if (!s.is_square()) throw DimensionError("is_negative_semidefinite: matrix is not square");
  if (asymmetry(s) > 1e-12 * std::max(1.0, s.max_abs())) {
    throw DomainError("is_negative_semidefinite: asymmetry exceeds 1e-12");
  }
  if (s.empty()) return true;
  return sym_eig_extrema(s).max <= tol;
}

}  // namespace gsisio
