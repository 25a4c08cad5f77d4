#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "omplab/errors.hpp"
#include "omplab/types.hpp"

// Dense kernels for the decoder and the isometry-constant estimators,
// sized for column sets of a few dozen vectors.

namespace omplab {

inline Vector matvec(const DenseMatrix& A, const Vector& v) {
  if (static_cast<int>(v.size()) != A.cols()) {
    throw ContractViolation("matvec: vector length must equal matrix cols");
  }
  Vector out(A.rows(), 0.0);
  for (int i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < A.cols(); ++j) s += A(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline Vector transpose_matvec(const DenseMatrix& A, const Vector& r) {
  if (static_cast<int>(r.size()) != A.rows()) {
    throw ContractViolation("transpose_matvec: vector length must equal matrix rows");
  }
  Vector out(A.cols(), 0.0);
  for (int i = 0; i < A.rows(); ++i) {
    const double ri = r[i];
    for (int j = 0; j < A.cols(); ++j) out[j] += A(i, j) * ri;
  }
  return out;
}

/// A^T A of an n x m matrix.
inline DenseMatrix gram(const DenseMatrix& A) {
  const int m = A.cols();
  DenseMatrix G(m, m);
  for (int k = 0; k < A.rows(); ++k) {
    for (int i = 0; i < m; ++i) {
      const double aki = A(k, i);
      if (aki == 0.0) continue;
      for (int j = i; j < m; ++j) G(i, j) += aki * A(k, j);
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j) G(i, j) = G(j, i);
  }
  return G;
}

struct SymmetricEigen {
  Vector values;       // ascending
  DenseMatrix vectors;  // column j pairs with values[j]; 1x1 identity if not requested
};

/// Eigendecomposition of a small symmetric matrix by cyclic Jacobi rotations.
/// The input is symmetrized; convergence is to ~1e-15 of the Frobenius norm.
inline SymmetricEigen symmetric_eigen(const DenseMatrix& A, bool want_vectors) {
  if (A.rows() != A.cols()) throw ContractViolation("symmetric_eigen: matrix must be square");
  const int m = A.rows();
  DenseMatrix S(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) S(i, j) = 0.5 * (A(i, j) + A(j, i));
  }
  DenseMatrix V = want_vectors ? DenseMatrix::identity(m) : DenseMatrix(1, 1);

  double fro = 0.0;
  for (double x : S.entries()) fro += x * x;
  fro = std::sqrt(fro);

  if (fro > 0.0) {
    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
      double off = 0.0;
      for (int p = 0; p < m; ++p) {
        for (int q = p + 1; q < m; ++q) off += 2.0 * S(p, q) * S(p, q);
      }
      if (std::sqrt(off) <= 1e-15 * fro) break;

      for (int p = 0; p < m - 1; ++p) {
        for (int q = p + 1; q < m; ++q) {
          const double apq = S(p, q);
          if (apq == 0.0) continue;
          const double theta = (S(q, q) - S(p, p)) / (2.0 * apq);
          double t;
          if (std::abs(theta) > 1e154) {
            t = 1.0 / (2.0 * theta);
          } else {
            t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            if (theta < 0.0) t = -t;
          }
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;

          const double spp = S(p, p);
          const double sqq = S(q, q);
          S(p, p) = c * c * spp - 2.0 * s * c * apq + s * s * sqq;
          S(q, q) = s * s * spp + 2.0 * s * c * apq + c * c * sqq;
          S(p, q) = S(q, p) = 0.0;
          for (int i = 0; i < m; ++i) {
            if (i == p || i == q) continue;
            const double sip = S(i, p);
            const double siq = S(i, q);
            S(i, p) = S(p, i) = c * sip - s * siq;
            S(i, q) = S(q, i) = s * sip + c * siq;
          }
          if (want_vectors) {
            for (int i = 0; i < m; ++i) {
              const double vip = V(i, p);
              const double viq = V(i, q);
              V(i, p) = c * vip - s * viq;
              V(i, q) = s * vip + c * viq;
            }
          }
        }
      }
    }
  }

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return S(a, a) < S(b, b); });

  SymmetricEigen out{Vector(m), want_vectors ? DenseMatrix(m, m) : DenseMatrix(1, 1)};
  for (int j = 0; j < m; ++j) {
    out.values[j] = S(order[j], order[j]);
    if (want_vectors) {
      for (int i = 0; i < m; ++i) out.vectors(i, j) = V(i, order[j]);
    }
  }
  return out;
}

struct EigenBounds {
  double min = 0.0;
  double max = 0.0;
};

/// Smallest and largest eigenvalues of Phi_T^T Phi_T.
inline EigenBounds gram_eigen_bounds(const DenseMatrix& phi_t) {
  const SymmetricEigen eig = symmetric_eigen(gram(phi_t), false);
  return EigenBounds{eig.values.front(), eig.values.back()};
}

namespace detail {

// One Householder reflector H = I - tau * v v^T with v[offset] = 1.
struct Reflector {
  int offset = 0;
  double tau = 0.0;
  Vector v;  // full length; entries below offset are zero
};

inline void apply_reflector(const Reflector& h, Vector& x) {
  if (h.tau == 0.0) return;
  double w = 0.0;
  for (std::size_t i = h.offset; i < x.size(); ++i) w += h.v[i] * x[i];
  w *= h.tau;
  for (std::size_t i = h.offset; i < x.size(); ++i) x[i] -= w * h.v[i];
}

// In-place Householder QR of the dense column set `cols` (each length nrows),
// with optional column pivoting. Returns the reflectors; `perm[t]` is the
// original position of the column now at position t.
inline std::vector<Reflector> householder_qr(std::vector<Vector>& cols, int nrows,
                                             std::vector<int>& perm, bool pivot) {
  const int m = static_cast<int>(cols.size());
  perm.resize(m);
  std::iota(perm.begin(), perm.end(), 0);
  const int kmax = std::min(nrows, m);
  std::vector<Reflector> hs;
  hs.reserve(kmax);

  for (int step = 0; step < kmax; ++step) {
    if (pivot) {
      int best = step;
      double best_norm = -1.0;
      for (int j = step; j < m; ++j) {
        double s = 0.0;
        for (int i = step; i < nrows; ++i) s += cols[j][i] * cols[j][i];
        if (s > best_norm) {
          best_norm = s;
          best = j;
        }
      }
      std::swap(cols[step], cols[best]);
      std::swap(perm[step], perm[best]);
    }

    double norm2 = 0.0;
    for (int i = step; i < nrows; ++i) norm2 += cols[step][i] * cols[step][i];
    const double normx = std::sqrt(norm2);
    Reflector h;
    h.offset = step;
    h.v.assign(nrows, 0.0);
    if (normx == 0.0) {
      h.tau = 0.0;  // nothing to eliminate
      hs.push_back(std::move(h));
      continue;
    }
    const double alpha = cols[step][step];
    const double beta = alpha >= 0.0 ? -normx : normx;
    const double v0 = alpha - beta;
    h.v[step] = 1.0;
    for (int i = step + 1; i < nrows; ++i) h.v[i] = cols[step][i] / v0;
    h.tau = (beta - alpha) / beta;
    cols[step][step] = beta;
    for (int i = step + 1; i < nrows; ++i) cols[step][i] = 0.0;
    for (int j = step + 1; j < m; ++j) apply_reflector(h, cols[j]);
    hs.push_back(std::move(h));
  }
  return hs;
}

}  // namespace detail

struct LeastSquaresResult {
  Vector solution;  // length Phi.cols(), zero off the support
  int rank = 0;     // numerical rank of the restricted column set
};

/// Minimizer of ||y - Phi z|| over supp(z) within `support`; when the
/// restricted columns are rank deficient this is the minimum-l2-norm
/// minimizer (complete orthogonal factorization, pivots below
/// 1e-12 x largest treated as zero).
inline LeastSquaresResult least_squares_on_support_info(const DenseMatrix& Phi, const Vector& y,
                                                        const IndexSet& support) {
  if (support.empty()) throw ContractViolation("least_squares_on_support: empty support");
  if (static_cast<int>(y.size()) != Phi.rows()) {
    throw ContractViolation("least_squares_on_support: y length must equal matrix rows");
  }
  require_finite(y, "least_squares_on_support: y");
  const int n = Phi.rows();
  const int m = static_cast<int>(support.size());

  std::vector<Vector> cols(m);
  for (int t = 0; t < m; ++t) {
    const int j = support[t];
    if (j >= Phi.cols()) throw ContractViolation("least_squares_on_support: index out of range");
    cols[t] = Phi.column(j);
  }

  std::vector<int> perm;
  const auto hs = detail::householder_qr(cols, n, perm, /*pivot=*/true);

  const double largest = std::abs(cols[0][0]);
  const double tol = 1e-12 * largest;
  int rank = 0;
  const int kmax = std::min(n, m);
  while (rank < kmax && std::abs(cols[rank][rank]) > tol) ++rank;

  LeastSquaresResult res;
  res.rank = rank;
  res.solution.assign(Phi.cols(), 0.0);
  if (rank == 0) return res;  // all-zero columns: minimum-norm minimizer is 0

  Vector qty = y;
  for (const auto& h : hs) detail::apply_reflector(h, qty);

  Vector w(m, 0.0);
  if (rank == m) {
    for (int i = m - 1; i >= 0; --i) {
      double s = qty[i];
      for (int j = i + 1; j < m; ++j) s -= cols[j][i] * w[j];
      w[i] = s / cols[i][i];
    }
  } else {
    // Minimum-norm completion: QR the transpose of the leading rank rows,
    // solve the triangular system, and map back through the second Q.
    std::vector<Vector> rt(rank, Vector(m, 0.0));
    for (int i = 0; i < rank; ++i) {
      for (int j = i; j < m; ++j) rt[i][j] = cols[j][i];  // row i of R, as a column of R^T
    }
    std::vector<int> perm2;
    const auto hs2 = detail::householder_qr(rt, m, perm2, /*pivot=*/false);

    Vector s(rank, 0.0);
    for (int i = 0; i < rank; ++i) {
      double acc = qty[i];
      for (int j = 0; j < i; ++j) acc -= rt[i][j] * s[j];  // T^T is lower triangular
      s[i] = acc / rt[i][i];
    }
    for (int i = 0; i < rank; ++i) w[i] = s[i];
    for (auto it = hs2.rbegin(); it != hs2.rend(); ++it) detail::apply_reflector(*it, w);
  }

  for (int t = 0; t < m; ++t) res.solution[support[perm[t]]] = w[t];
  return res;
}

inline Vector least_squares_on_support(const DenseMatrix& Phi, const Vector& y,
                                       const IndexSet& support) {
  return least_squares_on_support_info(Phi, y, support).solution;
}

}  // namespace omplab
