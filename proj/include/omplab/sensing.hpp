#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "omplab/constants.hpp"
#include "omplab/errors.hpp"
#include "omplab/linalg.hpp"
#include "omplab/random.hpp"
#include "omplab/report.hpp"
#include "omplab/types.hpp"

// Random sensing ensembles and estimators for the restricted-isometry
// constant delta_k: exact enumeration over supports (guarded by a budget),
// Monte-Carlo lower bounds, a cheap Gershgorin upper bound, and the compound
// premise check delta_k + (1+delta) * delta_{alpha k} <= delta.

namespace omplab {

enum class Ensemble { gaussian, bernoulli, orthogonal };

inline const char* to_string(Ensemble e) {
  switch (e) {
    case Ensemble::gaussian: return "gaussian";
    case Ensemble::bernoulli: return "bernoulli";
    case Ensemble::orthogonal: return "orthogonal";
  }
  return "gaussian";
}

inline Ensemble ensemble_from_string(const std::string& s) {
  if (s == "gaussian") return Ensemble::gaussian;
  if (s == "bernoulli") return Ensemble::bernoulli;
  if (s == "orthogonal") return Ensemble::orthogonal;
  throw ContractViolation("ensemble: unknown value '" + s + "'");
}

struct MatrixSpec {
  Ensemble ensemble = Ensemble::gaussian;
  int rows = 1;
  int cols = 1;
  std::uint64_t seed = 0;
};

/// Draw a sensing matrix. Entries are filled row-major from an Rng seeded
/// with spec.seed, so a spec identifies its matrix bit-for-bit.
///   gaussian:   i.i.d. N(0, 1/n)
///   bernoulli:  i.i.d. +-1/sqrt(n), equiprobable (one uniform per entry)
///   orthogonal: Gram-Schmidt orthonormalization of a square Gaussian draw
inline DenseMatrix generate(const MatrixSpec& spec) {
  const int n = spec.rows;
  const int N = spec.cols;
  if (n < 1 || N < 1) throw ContractViolation("generate: dimensions must be >= 1");
  if (spec.ensemble == Ensemble::orthogonal) {
    if (n != N) throw ContractViolation("generate: orthogonal ensemble requires rows == cols");
  } else if (n > N) {
    throw ContractViolation("generate: random ensembles require rows <= cols");
  }

  Rng rng(spec.seed);
  DenseMatrix Phi(n, N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  switch (spec.ensemble) {
    case Ensemble::gaussian:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < N; ++j) Phi(i, j) = scale * rng.next_gaussian();
      }
      return Phi;
    case Ensemble::bernoulli:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < N; ++j) Phi(i, j) = rng.next_double() < 0.5 ? scale : -scale;
      }
      return Phi;
    case Ensemble::orthogonal: {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < N; ++j) Phi(i, j) = rng.next_gaussian();
      }
      // Modified Gram-Schmidt, two passes per column.
      std::vector<Vector> q;
      q.reserve(N);
      for (int j = 0; j < N; ++j) {
        Vector v = Phi.column(j);
        const double orig = l2_norm(v);
        double rho = orig;
        for (;;) {
          for (int pass = 0; pass < 2; ++pass) {
            for (const Vector& qi : q) {
              const double d = dot(qi, v);
              for (int i = 0; i < n; ++i) v[i] -= d * qi[i];
            }
          }
          rho = l2_norm(v);
          if (rho > 1e-10 * std::max(orig, 1.0)) break;
          // Degenerate draw (probability ~0): replace with a fresh column.
          for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
        }
        for (int i = 0; i < n; ++i) v[i] /= rho;
        q.push_back(std::move(v));
      }
      for (int j = 0; j < N; ++j) {
        for (int i = 0; i < n; ++i) Phi(i, j) = q[j][i];
      }
      return Phi;
    }
  }
  throw ContractViolation("generate: unknown ensemble");
}

enum class RipMethod { exact, monte_carlo_lower_bound };

inline const char* to_string(RipMethod m) {
  return m == RipMethod::exact ? "exact" : "monte_carlo_lower_bound";
}

struct RipEstimate {
  int k = 0;
  double delta = 0.0;
  RipMethod method = RipMethod::exact;
  std::uint64_t supports_examined = 0;
  std::optional<std::uint64_t> seed;  // Monte-Carlo only
};

inline constexpr std::uint64_t kDefaultSupportBudget = 2'000'000;

/// C(n, k), capped at `cap` + 1 to avoid overflow.
inline std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (c > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(c);
}

namespace detail {

inline double support_delta(const DenseMatrix& Phi, const std::vector<int>& supp) {
  const EigenBounds b = gram_eigen_bounds(Phi.columns(IndexSet(std::vector<int>(supp))));
  return std::max(b.max - 1.0, 1.0 - b.min);
}

}  // namespace detail

struct RipExactResult {
  RipEstimate estimate;
  IndexSet worst_support;  // a support attaining the maximum
};

/// Exact delta_k by enumerating every size-k support in lexicographic order.
/// Throws BudgetExceeded when C(N, k) surpasses `budget`.
inline RipExactResult rip_delta_exact_detailed(const DenseMatrix& Phi, int k,
                                               std::uint64_t budget = kDefaultSupportBudget) {
  const int N = Phi.cols();
  if (k < 1 || k > N) throw ContractViolation("rip_delta_exact: k must be in [1, N]");
  const std::uint64_t count = binomial_capped(N, k, budget);
  if (count > budget) {
    throw BudgetExceeded(
        "rip_delta_exact: C(N, k) exceeds the enumeration budget of " + std::to_string(budget) +
        " supports; use rip_delta_lower_bound for a sampled bound");
  }

  std::vector<int> supp(k);
  for (int i = 0; i < k; ++i) supp[i] = i;
  RipExactResult out;
  out.estimate.k = k;
  out.estimate.method = RipMethod::exact;
  double best = -1.0;
  std::uint64_t examined = 0;
  for (;;) {
    const double d = detail::support_delta(Phi, supp);
    ++examined;
    if (d > best) {
      best = d;
      out.worst_support = IndexSet(std::vector<int>(supp));
    }
    // next combination
    int i = k - 1;
    while (i >= 0 && supp[i] == N - k + i) --i;
    if (i < 0) break;
    ++supp[i];
    for (int j = i + 1; j < k; ++j) supp[j] = supp[j - 1] + 1;
  }
  out.estimate.delta = best;
  out.estimate.supports_examined = examined;
  return out;
}

inline RipEstimate rip_delta_exact(const DenseMatrix& Phi, int k,
                                   std::uint64_t budget = kDefaultSupportBudget) {
  return rip_delta_exact_detailed(Phi, k, budget).estimate;
}

/// Lower bound on delta_k from `samples` uniformly drawn supports
/// (substream t of `seed` drives sample t).
inline RipEstimate rip_delta_lower_bound(const DenseMatrix& Phi, int k, std::uint64_t samples,
                                         std::uint64_t seed) {
  const int N = Phi.cols();
  if (k < 1 || k > N) throw ContractViolation("rip_delta_lower_bound: k must be in [1, N]");
  if (samples < 1) throw ContractViolation("rip_delta_lower_bound: samples must be >= 1");
  RipEstimate out;
  out.k = k;
  out.method = RipMethod::monte_carlo_lower_bound;
  out.supports_examined = samples;
  out.seed = seed;
  double best = 0.0;
  for (std::uint64_t t = 0; t < samples; ++t) {
    Rng rng(substream_seed(seed, t));
    std::vector<int> supp = sample_distinct(rng, N, k);
    std::sort(supp.begin(), supp.end());
    best = std::max(best, detail::support_delta(Phi, supp));
  }
  out.delta = best;
  return out;
}

/// Upper bound on delta_k from Gershgorin disks of the full Gram matrix:
/// every eigenvalue of a size-k principal submatrix lies within
/// |G_ii - 1| + (sum of the k-1 largest |G_ij|, j != i) of 1.
inline double rip_delta_upper_gershgorin(const DenseMatrix& Phi, int k) {
  const int N = Phi.cols();
  if (k < 1 || k > N) throw ContractViolation("rip_delta_upper_gershgorin: k must be in [1, N]");
  const DenseMatrix G = gram(Phi);
  double worst = 0.0;
  Vector offdiag(N - 1);
  for (int i = 0; i < N; ++i) {
    int t = 0;
    for (int j = 0; j < N; ++j) {
      if (j != i) offdiag[t++] = std::abs(G(i, j));
    }
    std::sort(offdiag.begin(), offdiag.end(), std::greater<>());
    double radius = 0.0;
    for (int j = 0; j < k - 1; ++j) radius += offdiag[j];
    worst = std::max(worst, std::abs(G(i, i) - 1.0) + radius);
  }
  return worst;
}

/// Check delta_k + (1+delta) * delta_{alpha k} <= delta with
/// alpha = ceil(16 + 15 delta).
///
/// Each order is evaluated exactly when use_exact is set and the enumeration
/// fits the budget; otherwise it is bracketed by a Monte-Carlo lower bound
/// and a Gershgorin upper bound. The verdict is conclusive only when the
/// bracket decides it:
///   refuted       lower-bound LHS already exceeds delta
///   holds         upper-bound LHS stays within delta
///   inconclusive  otherwise (flagged per order in the context)
/// alpha*k > N yields status premise_undefined.
inline BoundReport check_rip_premise(const DenseMatrix& Phi, int k, double delta, bool use_exact,
                                     std::uint64_t samples = 1000, std::uint64_t seed = 0,
                                     std::uint64_t budget = kDefaultSupportBudget) {
  const int N = Phi.cols();
  if (k < 1 || k > N) throw ContractViolation("check_rip_premise: k must be in [1, N]");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ContractViolation("check_rip_premise: delta must be in (0, 1]");
  }
  const int alpha = alpha_of(delta);
  nlohmann::json ctx{{"k", k}, {"alpha", alpha}, {"delta", delta}, {"use_exact", use_exact}};

  const long long alpha_k = static_cast<long long>(alpha) * k;
  if (alpha_k > N) {
    ctx["reason"] = "alpha*k exceeds the signal dimension";
    // undefined LHS: NaN keeps the holds <=> lhs <= rhs + slack rule false
    return make_report("rip_premise", std::numeric_limits<double>::quiet_NaN(), delta,
                       PremiseStatus::premise_undefined, std::move(ctx));
  }

  struct Bracket {
    double low = 0.0;
    double high = 0.0;
    bool exact = false;
  };
  auto bracket_for = [&](int order, std::uint64_t stream) {
    Bracket b;
    if (use_exact && binomial_capped(N, order, budget) <= budget) {
      b.low = b.high = rip_delta_exact(Phi, order, budget).delta;
      b.exact = true;
    } else {
      b.low = rip_delta_lower_bound(Phi, order, samples, substream_seed(seed, stream)).delta;
      b.high = rip_delta_upper_gershgorin(Phi, order);
    }
    return b;
  };

  const Bracket bk = bracket_for(k, 0);
  const Bracket ba = bracket_for(static_cast<int>(alpha_k), 1);
  const double lhs_low = bk.low + (1.0 + delta) * ba.low;
  const double lhs_high = bk.high + (1.0 + delta) * ba.high;

  PremiseStatus status;
  if (!bound_holds(lhs_low, delta)) {
    status = PremiseStatus::refuted;
  } else if (bound_holds(lhs_high, delta)) {
    status = PremiseStatus::holds;
  } else {
    status = PremiseStatus::inconclusive;
  }

  ctx["alpha_k"] = alpha_k;
  ctx["lhs_upper"] = lhs_high;
  ctx["delta_k"] = {{"low", bk.low}, {"high", bk.high}, {"exact", bk.exact}};
  ctx["delta_alpha_k"] = {{"low", ba.low}, {"high", ba.high}, {"exact", ba.exact}};
  if (!bk.exact || !ba.exact) {
    ctx["samples"] = samples;
    ctx["seed"] = seed;
  }
  return make_report("rip_premise", lhs_low, delta, status, std::move(ctx));
}

/// Fraction of `trials` fresh draws (substream t of `seed` seeds draw t)
/// with ||Phi x||^2 <= C ||x||^2.
inline double boundedness_probability(const MatrixSpec& spec, const Vector& x, double C,
                                      int trials, std::uint64_t seed) {
  if (trials < 1) throw ContractViolation("boundedness_probability: trials must be >= 1");
  if (!(C > 0.0)) throw ContractViolation("boundedness_probability: C must be > 0");
  if (static_cast<int>(x.size()) != spec.cols) {
    throw ContractViolation("boundedness_probability: x length must equal spec.cols");
  }
  require_finite(x, "boundedness_probability: x");
  const double xnorm2 = dot(x, x);
  if (xnorm2 == 0.0) throw ContractViolation("boundedness_probability: x must be nonzero");

  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    MatrixSpec draw = spec;
    draw.seed = substream_seed(seed, static_cast<std::uint64_t>(t));
    const Vector img = matvec(generate(draw), x);
    if (dot(img, img) <= C * xnorm2) ++hits;
  }
  return static_cast<double>(hits) / trials;
}

inline nlohmann::json to_json(const RipEstimate& est) {
  nlohmann::json j{{"k", est.k},
                   {"delta", est.delta},
                   {"method", to_string(est.method)},
                   {"supports_examined", est.supports_examined}};
  if (est.seed) j["seed"] = *est.seed;
  return j;
}

}  // namespace omplab
