#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "omplab/constants.hpp"
#include "omplab/errors.hpp"
#include "omplab/linalg.hpp"
#include "omplab/omp.hpp"
#include "omplab/report.hpp"
#include "omplab/sensing.hpp"
#include "omplab/signal.hpp"
#include "omplab/types.hpp"

// Evaluators for the recovery guarantees: each runs the decoder (or just
// arithmetic), fills in both sides of the inequality, and returns a
// BoundReport rather than asserting. The guarantees are conditional, so the
// premise status travels with the report; callers decide what a violation
// means in light of it.

namespace omplab {

/// RIP order L = k * (N/k)^(2 - 2/p), rounded up and clamped to [k, N].
inline int lemma1_order(int N, int k, double p) {
  if (k < 1 || k > N) throw ContractViolation("lemma1_order: k must be in [1, N]");
  if (!(p >= 1.0 && p < 2.0)) throw ContractViolation("lemma1_order: p must be in [1, 2)");
  const double raw = k * std::pow(static_cast<double>(N) / k, 2.0 - 2.0 / p);
  const double snapped = std::abs(raw - std::round(raw)) <= 1e-9 ? std::round(raw)
                                                                 : std::ceil(raw);
  return std::clamp(static_cast<int>(snapped), k, N);
}

/// Right-hand side of the noisy recovery bound:
///   C0 * sigma_k(x)_p / k^(1/p - 1/q) + C1 * k^(1/q - 1/2) * eps.
/// Requires 1 <= p <= q <= 2 with p != 2.
inline double theorem1_rhs(const Vector& x, int k, double p, double q, double eps, double delta) {
  if (p == 2.0) {
    throw ExcludedCase("theorem1_rhs: p = 2 is excluded; use the l2-in-probability bound");
  }
  if (!(p >= 1.0 && p <= q && q <= 2.0)) {
    throw ContractViolation("theorem1_rhs: exponents must satisfy 1 <= p <= q <= 2");
  }
  if (k < 1) throw ContractViolation("theorem1_rhs: k must be >= 1");
  if (!(eps >= 0.0)) throw ContractViolation("theorem1_rhs: eps must be >= 0");
  const TheoremConstants c = constants(delta, q);
  const double kd = static_cast<double>(k);
  return c.C0 * sigma_k(x, k, p) / std::pow(kd, 1.0 / p - 1.0 / q) +
         c.C1 * std::pow(kd, 1.0 / q - 0.5) * eps;
}

/// Decode y = Phi x + e with M = 2(alpha-1)k iterations and compare
/// ||x* - x||_q against theorem1_rhs. The premise status is supplied by the
/// caller (it involves RIP orders this routine does not evaluate).
inline BoundReport verify_theorem1(const DenseMatrix& Phi, const Vector& x, const Vector& e,
                                   int k, double p, double q, double delta,
                                   PremiseStatus premise = PremiseStatus::not_checked) {
  const int N = Phi.cols();
  if (static_cast<int>(x.size()) != N) {
    throw ContractViolation("verify_theorem1: x length must equal matrix cols");
  }
  if (static_cast<int>(e.size()) != Phi.rows()) {
    throw ContractViolation("verify_theorem1: e length must equal matrix rows");
  }
  const int alpha = alpha_of(delta);
  const long long M = 2LL * (alpha - 1) * k;
  if (M > N) {
    throw IterationBudget("verify_theorem1: 2(alpha-1)k = " + std::to_string(M) +
                          " iterations exceed the " + std::to_string(N) +
                          " available columns");
  }
  const double eps = l2_norm(e);
  const double rhs = theorem1_rhs(x, k, p, q, eps, delta);  // validates k, p, q

  Vector y = matvec(Phi, x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += e[i];
  const RecoveryResult rec = omp_decode(Phi, y, OmpOptions{static_cast<int>(M), 1e-12});

  Vector diff = rec.estimate;
  for (int i = 0; i < N; ++i) diff[i] -= x[i];
  const double lhs = lp_norm(diff, q);

  nlohmann::json ctx{{"k", k},       {"p", p},
                     {"q", q},       {"delta", delta},
                     {"alpha", alpha}, {"iterations_allowed", M},
                     {"epsilon", eps}, {"iterations_run", rec.iterations_run},
                     {"stopped_early", rec.stopped_early},
                     {"rip_order_L", lemma1_order(N, k, p)}};
  return make_report("theorem1", lhs, rhs, premise, std::move(ctx));
}

/// Noiseless l2 variant: decode y = Phi x with M = (alpha-1)k iterations and
/// compare ||x* - x||_2 against C3 * sigma_k(x)_2, where C3 uses the
/// boundedness constant c_bound.
inline BoundReport verify_theorem2(const DenseMatrix& Phi, const Vector& x, int k, double delta,
                                   double c_bound,
                                   PremiseStatus premise = PremiseStatus::not_checked) {
  const int N = Phi.cols();
  if (static_cast<int>(x.size()) != N) {
    throw ContractViolation("verify_theorem2: x length must equal matrix cols");
  }
  if (k < 1 || k > N) throw ContractViolation("verify_theorem2: k must be in [1, N]");
  const TheoremConstants c = constants(delta, 2.0, c_bound);
  const int alpha = c.alpha;
  const long long M = static_cast<long long>(alpha - 1) * k;
  if (M > N) {
    throw IterationBudget("verify_theorem2: (alpha-1)k = " + std::to_string(M) +
                          " iterations exceed the " + std::to_string(N) +
                          " available columns");
  }

  const Vector y = matvec(Phi, x);
  const RecoveryResult rec = omp_decode(Phi, y, OmpOptions{static_cast<int>(M), 1e-12});
  Vector diff = rec.estimate;
  for (int i = 0; i < N; ++i) diff[i] -= x[i];
  const double lhs = l2_norm(diff);
  const double rhs = *c.C3 * sigma_k(x, k, 2.0);

  nlohmann::json ctx{{"k", k},
                     {"delta", delta},
                     {"C_bound", c_bound},
                     {"C3", *c.C3},
                     {"alpha", alpha},
                     {"iterations_allowed", M},
                     {"iterations_run", rec.iterations_run},
                     {"stopped_early", rec.stopped_early}};
  return make_report("theorem2", lhs, rhs, premise, std::move(ctx));
}

/// Residual-domination guarantee: decode y with s = (alpha-1)*||xbar||_0
/// iterations and compare ||Phi x* - y||^2 against
/// (11+20 delta) * ||Phi xbar - y||^2. The premise at order ||xbar||_0 is
/// checked internally and attached to the report.
inline BoundReport verify_zhang(const DenseMatrix& Phi, const Vector& y, const Vector& xbar,
                                double delta, bool premise_use_exact = true,
                                std::uint64_t premise_samples = 1000,
                                std::uint64_t premise_seed = 0) {
  const int N = Phi.cols();
  if (static_cast<int>(xbar.size()) != N) {
    throw ContractViolation("verify_zhang: xbar length must equal matrix cols");
  }
  const int k0 = static_cast<int>(support(xbar, 0.0).size());
  if (k0 < 1) throw ContractViolation("verify_zhang: xbar must have at least one nonzero");
  const int alpha = alpha_of(delta);
  const long long s = static_cast<long long>(alpha - 1) * k0;
  if (s > N) {
    throw IterationBudget("verify_zhang: (alpha-1)*||xbar||_0 = " + std::to_string(s) +
                          " iterations exceed the " + std::to_string(N) +
                          " available columns");
  }

  const BoundReport premise_rep =
      check_rip_premise(Phi, k0, delta, premise_use_exact, premise_samples, premise_seed);

  const RecoveryResult rec = omp_decode(Phi, y, OmpOptions{static_cast<int>(s), 1e-12});
  Vector res_star = matvec(Phi, rec.estimate);
  Vector res_bar = matvec(Phi, xbar);
  for (std::size_t i = 0; i < y.size(); ++i) {
    res_star[i] -= y[i];
    res_bar[i] -= y[i];
  }
  const double lhs = dot(res_star, res_star);
  const double rhs = (11.0 + 20.0 * delta) * dot(res_bar, res_bar);

  nlohmann::json ctx{{"sparsity", k0},
                     {"delta", delta},
                     {"alpha", alpha},
                     {"iterations_allowed", s},
                     {"iterations_run", rec.iterations_run},
                     {"stopped_early", rec.stopped_early},
                     {"premise", to_json(premise_rep)}};
  return make_report("zhang", lhs, rhs, premise_rep.premise, std::move(ctx));
}

/// ||Phi z||_2 <= sqrt(1+delta) * (||z||_2 + ||z||_p / k^(1/p - 1/2)).
/// delta must be a verified upper bound on delta_L at L = lemma1_order.
inline BoundReport verify_lemma1(const DenseMatrix& Phi, const Vector& z, int k, double p,
                                 double delta,
                                 PremiseStatus premise = PremiseStatus::not_checked) {
  if (static_cast<int>(z.size()) != Phi.cols()) {
    throw ContractViolation("verify_lemma1: z length must equal matrix cols");
  }
  if (!(p >= 1.0 && p < 2.0)) throw ContractViolation("verify_lemma1: p must be in [1, 2)");
  if (k < 1) throw ContractViolation("verify_lemma1: k must be >= 1");
  const double lhs = l2_norm(matvec(Phi, z));
  const double rhs = std::sqrt(1.0 + delta) *
                     (l2_norm(z) + lp_norm(z, p) / std::pow(static_cast<double>(k), 1.0 / p - 0.5));
  nlohmann::json ctx{{"k", k},
                     {"p", p},
                     {"delta", delta},
                     {"rip_order_L", lemma1_order(Phi.cols(), k, p)}};
  return make_report("lemma1", lhs, rhs, premise, std::move(ctx));
}

/// sigma_k(z)_q <= ||z||_p / k^(1/p - 1/q) for 1 <= p <= q.
inline BoundReport verify_lemma2(const Vector& z, int k, double p, double q) {
  if (!(p >= 1.0 && q >= p)) {
    throw ContractViolation("verify_lemma2: exponents must satisfy 1 <= p <= q");
  }
  if (k < 1 || k > static_cast<int>(z.size())) {
    throw ContractViolation("verify_lemma2: k must be in [1, N]");
  }
  const double r = 1.0 / p - 1.0 / q;
  const double lhs = sigma_k(z, k, q);
  const double rhs = lp_norm(z, p) / std::pow(static_cast<double>(k), r);
  nlohmann::json ctx{{"k", k}, {"p", p}, {"q", q}, {"r", r}};
  return make_report("lemma2", lhs, rhs, PremiseStatus::not_checked, std::move(ctx));
}

/// ||b||_q / k^(1/q - 1/2) <= ||b||_2 for b of length k, 1 <= q <= 2.
inline BoundReport verify_holder(const Vector& b, double q) {
  if (b.empty()) throw ContractViolation("verify_holder: b must be nonempty");
  if (!(q >= 1.0 && q <= 2.0)) throw ContractViolation("verify_holder: q must be in [1, 2]");
  const int k = static_cast<int>(b.size());
  const double lhs = lp_norm(b, q) / std::pow(static_cast<double>(k), 1.0 / q - 0.5);
  const double rhs = l2_norm(b);
  nlohmann::json ctx{{"k", k}, {"q", q}};
  return make_report("holder", lhs, rhs, PremiseStatus::not_checked, std::move(ctx));
}

/// Least-squares reconstruction on a known support T0 (the oracle baseline):
/// (Phi_T0^T Phi_T0)^-1 Phi_T0^T y on T0, zero elsewhere. Falls back to the
/// minimum-norm solution when Phi_T0 is rank deficient; *rank_deficient
/// reports that when requested.
inline Vector oracle_ls_decoder(const DenseMatrix& Phi, const Vector& y, const IndexSet& t0,
                                bool* rank_deficient = nullptr) {
  if (t0.empty()) throw ContractViolation("oracle_ls_decoder: support must be nonempty");
  const LeastSquaresResult res = least_squares_on_support_info(Phi, y, t0);
  if (rank_deficient) *rank_deficient = res.rank < static_cast<int>(t0.size());
  return res.solution;
}

/// Evaluate both halves of the noisy-recovery hypothesis: RIP(L, delta),
/// i.e. delta_L < delta, and the compound delta_k + (1+delta) delta_{alpha k}
/// <= delta. Each half is reported separately in the context; the combined
/// status is holds/refuted only when both halves are conclusive.
inline BoundReport check_theorem1_premise(const DenseMatrix& Phi, int k, double p, double delta,
                                          bool use_exact, std::uint64_t samples = 1000,
                                          std::uint64_t seed = 0,
                                          std::uint64_t budget = kDefaultSupportBudget) {
  const int N = Phi.cols();
  const int L = lemma1_order(N, k, p);
  const BoundReport compound = check_rip_premise(Phi, k, delta, use_exact, samples, seed, budget);

  double l_low, l_high;
  bool l_exact = false;
  if (use_exact && binomial_capped(N, L, budget) <= budget) {
    l_low = l_high = rip_delta_exact(Phi, L, budget).delta;
    l_exact = true;
  } else {
    l_low = rip_delta_lower_bound(Phi, L, samples, substream_seed(seed, 2)).delta;
    l_high = rip_delta_upper_gershgorin(Phi, L);
  }
  // RIP(L, delta) means delta_L < delta (strict).
  PremiseStatus rip_status;
  if (l_low >= delta) {
    rip_status = PremiseStatus::refuted;
  } else if (l_high < delta) {
    rip_status = PremiseStatus::holds;
  } else {
    rip_status = PremiseStatus::inconclusive;
  }

  PremiseStatus status;
  if (compound.premise == PremiseStatus::premise_undefined) {
    status = PremiseStatus::premise_undefined;
  } else if (compound.premise == PremiseStatus::refuted || rip_status == PremiseStatus::refuted) {
    status = PremiseStatus::refuted;
  } else if (compound.premise == PremiseStatus::holds && rip_status == PremiseStatus::holds) {
    status = PremiseStatus::holds;
  } else {
    status = PremiseStatus::inconclusive;
  }

  nlohmann::json ctx{{"k", k},
                     {"p", p},
                     {"delta", delta},
                     {"rip_order_L", L},
                     {"rip_L", {{"low", l_low}, {"high", l_high}, {"exact", l_exact},
                                {"status", to_string(rip_status)}}},
                     {"compound", to_json(compound)}};
  BoundReport rep = make_report("theorem1_premise", compound.lhs, delta, status, std::move(ctx));
  return rep;
}

}  // namespace omplab
