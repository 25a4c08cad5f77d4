#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "omplab/errors.hpp"
#include "omplab/types.hpp"

// Sparse-signal vocabulary: lp norms, best k-term approximation and its
// error, support extraction.

namespace omplab {

constexpr double kInfinityExponent = std::numeric_limits<double>::infinity();

/// (sum |x_i|^p)^(1/p); max |x_i| for p = infinity. Requires p >= 1.
inline double lp_norm(const Vector& x, double p) {
  if (!(p >= 1.0)) {
    throw ContractViolation("lp_norm: exponent must satisfy p >= 1 (or infinity)");
  }
  if (p == kInfinityExponent) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  if (p == 2.0) return l2_norm(x);
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s, 1.0 / p);
}

struct KTermApprox {
  int k = 0;
  Vector approx;    // agrees with x on `kept`, zero elsewhere
  double error_p = 0.0;
  IndexSet kept;
};

/// Keep the k largest-magnitude entries (optimal in every lp norm); exact
/// magnitude ties keep the lower index.
inline KTermApprox best_k_term(const Vector& x, int k, double p) {
  const int N = static_cast<int>(x.size());
  if (k < 0 || k > N) throw ContractViolation("best_k_term: k must be in [0, N]");
  if (!(p >= 1.0)) {
    throw ContractViolation("best_k_term: exponent must satisfy p >= 1 (or infinity)");
  }

  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(x[a]);
    const double mb = std::abs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });

  KTermApprox out;
  out.k = k;
  out.approx.assign(N, 0.0);
  std::vector<int> kept(order.begin(), order.begin() + k);
  out.kept = IndexSet::from_unsorted(std::move(kept));
  Vector rest(x);
  for (int j : out.kept) {
    out.approx[j] = x[j];
    rest[j] = 0.0;
  }
  out.error_p = lp_norm(rest, p);
  return out;
}

/// Best k-term approximation error sigma_k(x)_p.
inline double sigma_k(const Vector& x, int k, double p) {
  return best_k_term(x, k, p).error_p;
}

/// Indices with |x_i| > tol.
inline IndexSet support(const Vector& x, double tol) {
  if (!(tol >= 0.0)) throw ContractViolation("support: tolerance must be >= 0");
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    if (std::abs(x[i]) > tol) idx.push_back(i);
  }
  return IndexSet(std::move(idx));
}

}  // namespace omplab
