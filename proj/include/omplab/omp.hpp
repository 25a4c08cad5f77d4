#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "omplab/errors.hpp"
#include "omplab/linalg.hpp"
#include "omplab/types.hpp"

namespace omplab {

struct OmpOptions {
  int max_iterations = 1;
  double residual_stop_rel = 1e-12;  // stop when ||r|| <= rel * ||y||
};

struct RecoveryResult {
  Vector estimate;               // length N, supported on `selected`
  IndexSet selected;             // final support, ascending
  std::vector<int> chosen_order; // indices in selection order
  Vector residual_norms;         // ||r^l||, l = 0..iterations_run
  int iterations_run = 0;
  bool stopped_early = false;
};

/// Greedy decoder: repeatedly select the column most correlated with the
/// residual, then re-fit by least squares on the selected set.
///
/// Stops at max_iterations, at ||r|| <= residual_stop_rel * ||y||, or when
/// every unselected column has exactly zero correlation. Ties in the
/// correlation argmax go to the lowest index; selected indices are excluded
/// from later matches.
inline RecoveryResult omp_decode(const DenseMatrix& Phi, const Vector& y,
                                 const OmpOptions& opts) {
  const int n = Phi.rows();
  const int N = Phi.cols();
  if (static_cast<int>(y.size()) != n) {
    throw ContractViolation("omp_decode: y length must equal matrix rows");
  }
  if (opts.max_iterations < 1) throw ContractViolation("omp_decode: max_iterations must be >= 1");
  if (opts.max_iterations > N) {
    throw ContractViolation("omp_decode: max_iterations exceeds column count");
  }
  if (!(opts.residual_stop_rel >= 0.0)) {
    throw ContractViolation("omp_decode: residual_stop_rel must be >= 0");
  }
  require_finite(y, "omp_decode: y");

  const double ynorm = l2_norm(y);
  RecoveryResult out;
  out.estimate.assign(N, 0.0);
  out.residual_norms.push_back(ynorm);

  Vector r = y;
  std::vector<bool> selected(N, false);

  // Incremental thin QR of the selected columns. q_cols stay orthonormal via
  // twice-applied Gram-Schmidt; r_cols[t] is column t of the R factor.
  std::vector<Vector> q_cols;
  std::vector<Vector> r_cols;
  Vector qty;
  bool dependent_column = false;  // switch to the rank-revealing solver

  for (int ell = 0; ell < opts.max_iterations; ++ell) {
    if (out.residual_norms.back() <= opts.residual_stop_rel * ynorm) {
      out.stopped_early = true;
      break;
    }

    const Vector h = transpose_matvec(Phi, r);
    int best = -1;
    double best_abs = 0.0;
    for (int j = 0; j < N; ++j) {
      if (selected[j]) continue;
      const double a = std::abs(h[j]);
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best < 0 || best_abs == 0.0) {
      out.stopped_early = true;
      break;
    }

    selected[best] = true;
    out.chosen_order.push_back(best);

    if (!dependent_column) {
      Vector v = Phi.column(best);
      const double col_norm = l2_norm(v);
      Vector rcol(q_cols.size(), 0.0);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t t = 0; t < q_cols.size(); ++t) {
          const double d = dot(q_cols[t], v);
          rcol[t] += d;
          for (int i = 0; i < n; ++i) v[i] -= d * q_cols[t][i];
        }
      }
      const double rho = l2_norm(v);
      if (rho <= 1e-12 * col_norm) {
        dependent_column = true;  // the new column adds (numerically) nothing
      } else {
        for (int i = 0; i < n; ++i) v[i] /= rho;
        rcol.push_back(rho);
        const double qy = dot(v, y);
        qty.push_back(qy);
        for (int i = 0; i < n; ++i) r[i] -= qy * v[i];
        q_cols.push_back(std::move(v));
        r_cols.push_back(std::move(rcol));
      }
    }
    if (dependent_column) {
      const auto ls = least_squares_on_support(
          Phi, y, IndexSet::from_unsorted(out.chosen_order));
      r = y;
      const Vector fit = matvec(Phi, ls);
      for (int i = 0; i < n; ++i) r[i] -= fit[i];
      out.estimate = ls;
    }
    out.residual_norms.push_back(l2_norm(r));
    ++out.iterations_run;
  }

  if (!dependent_column && !out.chosen_order.empty()) {
    const int L = static_cast<int>(q_cols.size());
    Vector w(L, 0.0);
    for (int i = L - 1; i >= 0; --i) {
      double s = qty[i];
      for (int j = i + 1; j < L; ++j) s -= r_cols[j][i] * w[j];
      w[i] = s / r_cols[i][i];
    }
    for (int t = 0; t < L; ++t) out.estimate[out.chosen_order[t]] = w[t];
  }
  out.selected = IndexSet::from_unsorted(out.chosen_order);
  return out;
}

}  // namespace omplab
