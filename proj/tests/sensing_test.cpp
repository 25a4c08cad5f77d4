#include "omplab/sensing.hpp"

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "omplab/random.hpp"

using namespace omplab;

namespace {

// Closed-form eigenvalues of the 2x2 Gram matrix [[a, b], [b, c]].
std::pair<double, double> two_by_two_eigen(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return {mean - disc, mean + disc};
}

}  // namespace

TEST(Generate, OrthogonalColumnsAreOrthonormal) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::orthogonal, 16, 16, 5});
  const DenseMatrix G = gram(Phi);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      EXPECT_NEAR(G(i, j), i == j ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(Generate, BernoulliEntriesAreScaledSigns) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::bernoulli, 4, 10, 99});
  for (double v : Phi.entries()) {
    EXPECT_TRUE(v == 0.5 || v == -0.5);
  }
}

TEST(Generate, GaussianColumnNormsConcentrate) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::gaussian, 50, 100, 123});
  double mean = 0.0;
  for (int j = 0; j < 100; ++j) mean += l2_norm(Phi.column(j));
  mean /= 100.0;
  EXPECT_GE(mean, 0.8);
  EXPECT_LE(mean, 1.2);
}

TEST(Generate, DeterministicInSeed) {
  const MatrixSpec spec{Ensemble::gaussian, 12, 20, 777};
  const DenseMatrix a = generate(spec);
  const DenseMatrix b = generate(spec);
  EXPECT_TRUE(a == b);
  MatrixSpec other = spec;
  other.seed = 778;
  EXPECT_FALSE(generate(other) == a);
}

TEST(Generate, RejectsInvalidShapes) {
  EXPECT_THROW(generate(MatrixSpec{Ensemble::orthogonal, 4, 8, 0}), ContractViolation);
  EXPECT_THROW(generate(MatrixSpec{Ensemble::gaussian, 8, 4, 0}), ContractViolation);
}

TEST(RipExact, OrthogonalMatrixHasZeroDelta) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::orthogonal, 8, 8, 21});
  for (int k : {1, 2, 3}) {
    const RipEstimate est = rip_delta_exact(Phi, k);
    EXPECT_NEAR(est.delta, 0.0, 1e-10);
    EXPECT_EQ(est.method, RipMethod::exact);
    EXPECT_EQ(est.supports_examined, binomial_capped(8, k, kDefaultSupportBudget));
  }
}

TEST(RipExact, DuplicatedUnitColumnGivesDeltaOne) {
  // identity columns plus an exact duplicate: the duplicate pair has Gram
  // [[1,1],[1,1]] with eigenvalues {0, 2}
  DenseMatrix Phi(4, 5);
  for (int i = 0; i < 4; ++i) Phi(i, i) = 1.0;
  Phi(0, 4) = 1.0;
  const auto res = rip_delta_exact_detailed(Phi, 2);
  EXPECT_NEAR(res.estimate.delta, 1.0, 1e-12);
  EXPECT_EQ(res.worst_support.indices(), (std::vector<int>{0, 4}));
}

TEST(RipExact, MatchesClosedFormPairOracle) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::gaussian, 8, 12, 31});
  const RipEstimate est = rip_delta_exact(Phi, 2);
  EXPECT_EQ(est.supports_examined, 66u);
  double expect = 0.0;
  for (int a = 0; a < 12; ++a) {
    const Vector ca = Phi.column(a);
    for (int b = a + 1; b < 12; ++b) {
      const Vector cb = Phi.column(b);
      const auto [lo, hi] = two_by_two_eigen(dot(ca, ca), dot(ca, cb), dot(cb, cb));
      expect = std::max({expect, hi - 1.0, 1.0 - lo});
    }
  }
  EXPECT_NEAR(est.delta, expect, 1e-7);
}

TEST(RipExact, BudgetGuard) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::gaussian, 10, 40, 2});
  EXPECT_THROW(rip_delta_exact(Phi, 10), BudgetExceeded);  // C(40,10) ~ 8.5e8
  EXPECT_THROW(rip_delta_exact(Phi, 3, 100), BudgetExceeded);
  EXPECT_THROW(rip_delta_exact(Phi, 0), ContractViolation);
  EXPECT_THROW(rip_delta_exact(Phi, 41), ContractViolation);
}

TEST(RipExact, MonotoneInOrder) {
  Rng seeds(60);
  for (int inst = 0; inst < 5; ++inst) {
    const DenseMatrix Phi =
        generate(MatrixSpec{Ensemble::gaussian, 6, 9, seeds.next_u64()});
    double prev = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double d = rip_delta_exact(Phi, k).delta;
      EXPECT_GE(d, prev - 1e-8);
      prev = d;
    }
  }
}

TEST(RipExact, ExtremalEigenvectorRealizesDelta) {
  Rng seeds(61);
  for (int inst = 0; inst < 5; ++inst) {
    const DenseMatrix Phi =
        generate(MatrixSpec{Ensemble::gaussian, 7, 10, seeds.next_u64()});
    const int k = 3;
    const auto res = rip_delta_exact_detailed(Phi, k);
    const SymmetricEigen eig = symmetric_eigen(gram(Phi.columns(res.worst_support)), true);
    // whichever end of the spectrum attains the max
    const int pick =
        std::abs(eig.values.front() - 1.0) >= std::abs(eig.values.back() - 1.0) ? 0 : k - 1;
    Vector u(Phi.cols(), 0.0);
    for (int t = 0; t < k; ++t) u[res.worst_support[t]] = eig.vectors(t, pick);
    const Vector img = matvec(Phi, u);
    EXPECT_GE(std::abs(dot(img, img) - 1.0), res.estimate.delta - 1e-6);
  }
}

TEST(RipLowerBound, NeverExceedsExact) {
  Rng seeds(62);
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 5 + static_cast<int>(seeds.next_below(4));
    const int N = n + static_cast<int>(seeds.next_below(5));
    const DenseMatrix Phi =
        generate(MatrixSpec{Ensemble::gaussian, n, N, seeds.next_u64()});
    const int k = 1 + static_cast<int>(seeds.next_below(3));
    const double exact = rip_delta_exact(Phi, k).delta;
    const RipEstimate lb = rip_delta_lower_bound(Phi, k, 30, seeds.next_u64());
    EXPECT_LE(lb.delta, exact + 1e-8);
    EXPECT_EQ(lb.method, RipMethod::monte_carlo_lower_bound);
  }
}

TEST(RipLowerBound, FullCoverageOnTinyInstanceMatchesExact) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::gaussian, 4, 4, 17});
  const double exact = rip_delta_exact(Phi, 1).delta;
  const RipEstimate lb = rip_delta_lower_bound(Phi, 1, 64, 5);
  EXPECT_NEAR(lb.delta, exact, 1e-12);  // 64 draws over 4 supports: all seen
}

TEST(RipLowerBound, OrthogonalIsZeroForAnySampling) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::orthogonal, 10, 10, 8});
  EXPECT_NEAR(rip_delta_lower_bound(Phi, 3, 25, 123).delta, 0.0, 1e-10);
}

TEST(RipGershgorin, UpperBoundDominatesExact) {
  Rng seeds(63);
  for (int inst = 0; inst < 10; ++inst) {
    const DenseMatrix Phi =
        generate(MatrixSpec{Ensemble::gaussian, 6, 8, seeds.next_u64()});
    for (int k : {1, 2, 3}) {
      EXPECT_GE(rip_delta_upper_gershgorin(Phi, k) + 1e-12, rip_delta_exact(Phi, k).delta);
    }
  }
}

TEST(CheckRipPremise, OrthogonalHoldsConclusively) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::orthogonal, 64, 64, 4});
  const BoundReport rep = check_rip_premise(Phi, 1, 1.0, true);
  EXPECT_EQ(rep.premise, PremiseStatus::holds);
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(rep.lhs, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(rep.rhs, 1.0);
}

TEST(CheckRipPremise, DuplicatedColumnsRefuted) {
  // delta = 0.5 so alpha = 24 and alpha*k = 48 <= N; with only 8 rows every
  // 48-column subset is rank deficient, so even sampled lower bounds refute.
  DenseMatrix Phi(8, 50);
  Rng rng(44);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 50; ++j) Phi(i, j) = rng.next_gaussian() / std::sqrt(8.0);
  }
  Vector c = Phi.column(7);
  const double norm = l2_norm(c);
  for (int i = 0; i < 8; ++i) {
    Phi(i, 7) = c[i] / norm;
    Phi(i, 23) = c[i] / norm;
  }
  const BoundReport rep = check_rip_premise(Phi, 2, 0.5, /*use_exact=*/false, 60, 3);
  EXPECT_EQ(rep.premise, PremiseStatus::refuted);
  EXPECT_FALSE(rep.holds);
}

TEST(CheckRipPremise, ExactRefutationFromDuplicatePair) {
  // identity-based matrix with a duplicated column: exact delta_2 = 1 > 0.5
  DenseMatrix Phi(48, 48);
  for (int i = 0; i < 48; ++i) Phi(i, i) = 1.0;
  for (int i = 0; i < 48; ++i) Phi(i, 47) = Phi(i, 0);
  const BoundReport rep = check_rip_premise(Phi, 2, 0.5, /*use_exact=*/true);
  EXPECT_EQ(rep.premise, PremiseStatus::refuted);
  EXPECT_GE(rep.lhs, 1.0 - 1e-9);
}

TEST(CheckRipPremise, OrderBeyondDimensionIsUndefined) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::gaussian, 8, 20, 6});
  const BoundReport rep = check_rip_premise(Phi, 2, 1.0, true);  // alpha*k = 62 > 20
  EXPECT_EQ(rep.premise, PremiseStatus::premise_undefined);
  EXPECT_FALSE(rep.holds);
  EXPECT_TRUE(std::isnan(rep.lhs));
  // NaN has no JSON representation; it serializes as null
  EXPECT_NE(to_json(rep).dump().find("\"lhs\":null"), std::string::npos);
}

TEST(CheckRipPremise, NearOrthogonalIsInconclusiveWithBounds) {
  // a perturbed orthogonal matrix: sampled lower bounds stay under delta but
  // the Gershgorin upper bound cannot certify it either
  DenseMatrix Phi = generate(MatrixSpec{Ensemble::orthogonal, 48, 48, 9});
  Rng rng(10);
  for (int i = 0; i < 48; ++i) {
    for (int j = 0; j < 48; ++j) Phi(i, j) += 0.01 * rng.next_gaussian();
  }
  const BoundReport rep = check_rip_premise(Phi, 1, 0.5, /*use_exact=*/false, 50, 11);
  EXPECT_EQ(rep.premise, PremiseStatus::inconclusive);
}

TEST(Boundedness, OrthogonalPreservesNorms) {
  const MatrixSpec spec{Ensemble::orthogonal, 16, 16, 0};
  Vector x(16, 0.0);
  x[2] = 3.0;
  x[9] = -4.0;
  EXPECT_DOUBLE_EQ(boundedness_probability(spec, x, 1.0 + 1e-9, 50, 7), 1.0);
}

TEST(Boundedness, HugeConstantAlwaysHolds) {
  const MatrixSpec spec{Ensemble::bernoulli, 4, 12, 0};
  Vector x(12, 1.0);
  EXPECT_DOUBLE_EQ(boundedness_probability(spec, x, 1e6, 100, 21), 1.0);
}

TEST(Boundedness, GaussianChiSquareTail) {
  const MatrixSpec spec{Ensemble::gaussian, 50, 60, 0};
  Vector x(60, 0.0);
  x[5] = 1.0;
  const double frac = boundedness_probability(spec, x, 2.0, 1000, 99);
  EXPECT_GE(frac, 0.99);
}

TEST(Boundedness, DeterministicInSeed) {
  const MatrixSpec spec{Ensemble::gaussian, 10, 15, 0};
  Vector x(15, 0.0);
  x[0] = 1.0;
  const double a = boundedness_probability(spec, x, 1.1, 64, 13);
  const double b = boundedness_probability(spec, x, 1.1, 64, 13);
  EXPECT_DOUBLE_EQ(a, b);
}

TEST(Boundedness, RejectsZeroSignal) {
  const MatrixSpec spec{Ensemble::gaussian, 4, 8, 0};
  EXPECT_THROW(boundedness_probability(spec, Vector(8, 0.0), 1.0, 10, 0), ContractViolation);
}

TEST(SubstreamSeeds, StableAndDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i) seen.insert(substream_seed(42, i));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_EQ(substream_seed(42, 7), substream_seed(42, 7));
}
