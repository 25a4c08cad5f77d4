#include "omplab/omp.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "omplab/random.hpp"
#include "omplab/sensing.hpp"
#include "omplab/signal.hpp"

using namespace omplab;

namespace {

// Independent re-implementation of the decoder loop: correlations by plain
// loops, the re-fit by Gaussian elimination on the normal equations. Shares
// no code with the incremental-QR path under test.
Vector naive_omp(const DenseMatrix& Phi, const Vector& y, int M) {
  const int n = Phi.rows();
  const int N = Phi.cols();
  std::vector<int> sel;
  Vector c(N, 0.0);
  Vector r = y;
  for (int ell = 0; ell < M; ++ell) {
    int best = -1;
    double best_abs = 0.0;
    for (int j = 0; j < N; ++j) {
      bool used = false;
      for (int s : sel) used = used || (s == j);
      if (used) continue;
      double h = 0.0;
      for (int i = 0; i < n; ++i) h += Phi(i, j) * r[i];
      if (std::abs(h) > best_abs) {
        best_abs = std::abs(h);
        best = j;
      }
    }
    if (best < 0 || best_abs == 0.0) break;
    sel.push_back(best);

    const int m = static_cast<int>(sel.size());
    // normal equations A^T A w = A^T y, solved by elimination with pivoting
    std::vector<Vector> M2(m, Vector(m + 1, 0.0));
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += Phi(i, sel[a]) * Phi(i, sel[b]);
        M2[a][b] = s;
      }
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += Phi(i, sel[a]) * y[i];
      M2[a][m] = s;
    }
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int row = col + 1; row < m; ++row) {
        if (std::abs(M2[row][col]) > std::abs(M2[piv][col])) piv = row;
      }
      std::swap(M2[col], M2[piv]);
      for (int row = 0; row < m; ++row) {
        if (row == col || M2[col][col] == 0.0) continue;
        const double f = M2[row][col] / M2[col][col];
        for (int t = col; t <= m; ++t) M2[row][t] -= f * M2[col][t];
      }
    }
    Vector w(m, 0.0);
    for (int a = 0; a < m; ++a) w[a] = M2[a][m] / M2[a][a];

    c.assign(N, 0.0);
    for (int a = 0; a < m; ++a) c[sel[a]] = w[a];
    for (int i = 0; i < n; ++i) {
      double fit = 0.0;
      for (int a = 0; a < m; ++a) fit += Phi(i, sel[a]) * w[a];
      r[i] = y[i] - fit;
    }
    if (l2_norm(r) <= 1e-12 * l2_norm(y)) break;
  }
  return c;
}

}  // namespace

TEST(OmpDecode, IdentityMatrixSelectsByMagnitude) {
  const DenseMatrix I = DenseMatrix::identity(4);
  const Vector y{0.0, 5.0, 0.0, -3.0};
  const auto rec = omp_decode(I, y, OmpOptions{2, 1e-12});
  EXPECT_EQ(rec.chosen_order, (std::vector<int>{1, 3}));
  EXPECT_EQ(rec.iterations_run, 2);
  EXPECT_NEAR(rec.estimate[1], 5.0, 1e-14);
  EXPECT_NEAR(rec.estimate[3], -3.0, 1e-14);
  EXPECT_NEAR(rec.residual_norms.back(), 0.0, 1e-14);
}

TEST(OmpDecode, ZeroMeasurementStopsImmediately) {
  Rng rng(5);
  DenseMatrix Phi(4, 6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) Phi(i, j) = rng.next_gaussian();
  }
  const auto rec = omp_decode(Phi, Vector(4, 0.0), OmpOptions{3, 1e-12});
  EXPECT_TRUE(rec.stopped_early);
  EXPECT_EQ(rec.iterations_run, 0);
  EXPECT_EQ(rec.estimate, Vector(6, 0.0));
  EXPECT_EQ(rec.residual_norms, Vector{0.0});
}

TEST(OmpDecode, RecoversWellSeparatedSparseSignal) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::gaussian, 20, 40, 7});
  Vector x(40, 0.0);
  x[4] = 10.0;
  x[17] = -6.0;
  x[31] = 3.0;
  const Vector y = matvec(Phi, x);
  const auto rec = omp_decode(Phi, y, OmpOptions{3, 1e-12});
  Vector diff = rec.estimate;
  for (int i = 0; i < 40; ++i) diff[i] -= x[i];
  EXPECT_LE(l2_norm(diff), 1e-8);
  EXPECT_EQ(rec.selected.indices(), (std::vector<int>{4, 17, 31}));

  const Vector naive = naive_omp(Phi, y, 3);
  for (int i = 0; i < 40; ++i) EXPECT_NEAR(rec.estimate[i], naive[i], 1e-8);
}

TEST(OmpDecode, MatchesNaiveReimplementationOnRandomInstances) {
  Rng rng(321);
  for (int inst = 0; inst < 25; ++inst) {
    const int n = 6 + static_cast<int>(rng.next_below(6));
    const int N = n + static_cast<int>(rng.next_below(10));
    DenseMatrix Phi(n, N);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < N; ++j) Phi(i, j) = rng.next_gaussian();
    }
    const Vector y = gaussian_vector(rng, n);
    const int M = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    const auto rec = omp_decode(Phi, y, OmpOptions{M, 1e-12});
    const Vector naive = naive_omp(Phi, y, M);
    for (int i = 0; i < N; ++i) EXPECT_NEAR(rec.estimate[i], naive[i], 1e-8);
  }
}

TEST(OmpDecode, NoiseOnOrthogonalColumnsProjectsCleanly) {
  const int N = 64;
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::orthogonal, N, N, 11});
  Vector x(N, 0.0);
  x[20] = 10.0;
  Rng rng(13);
  Vector e = gaussian_vector(rng, N);
  const double en = l2_norm(e);
  for (double& v : e) v *= 0.1 / en;
  Vector y = matvec(Phi, x);
  for (int i = 0; i < N; ++i) y[i] += e[i];

  const auto rec = omp_decode(Phi, y, OmpOptions{1, 1e-12});
  EXPECT_EQ(rec.chosen_order, (std::vector<int>{20}));
  Vector diff = rec.estimate;
  for (int i = 0; i < N; ++i) diff[i] -= x[i];
  EXPECT_LE(l2_norm(diff), 0.1 + 1e-12);
}

TEST(OmpDecode, TraceInvariants) {
  Rng rng(777);
  for (int inst = 0; inst < 40; ++inst) {
    const int n = 5 + static_cast<int>(rng.next_below(8));
    const int N = n + static_cast<int>(rng.next_below(12));
    DenseMatrix Phi(n, N);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < N; ++j) Phi(i, j) = rng.next_gaussian();
    }
    const Vector y = gaussian_vector(rng, n);
    const int M = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    const auto rec = omp_decode(Phi, y, OmpOptions{M, 1e-12});

    ASSERT_EQ(rec.residual_norms.size(), static_cast<std::size_t>(rec.iterations_run) + 1);
    for (std::size_t i = 1; i < rec.residual_norms.size(); ++i) {
      EXPECT_LE(rec.residual_norms[i], rec.residual_norms[i - 1] + 1e-9);
    }
    EXPECT_EQ(rec.selected.size(), static_cast<std::size_t>(rec.iterations_run));

    // each prefix is an exact least-squares fit, so its residual is
    // orthogonal to every selected column
    for (int len = 1; len <= rec.iterations_run; ++len) {
      const IndexSet prefix = IndexSet::from_unsorted(
          std::vector<int>(rec.chosen_order.begin(), rec.chosen_order.begin() + len));
      const Vector z = least_squares_on_support(Phi, y, prefix);
      Vector r = y;
      const Vector fit = matvec(Phi, z);
      for (int i = 0; i < n; ++i) r[i] -= fit[i];
      for (int j : prefix) {
        EXPECT_LE(std::abs(dot(r, Phi.column(j))), 1e-8 * l2_norm(y));
      }
    }
  }
}

TEST(OmpDecode, OrthonormalEquivalenceWithThresholding) {
  const int N = 32;
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::orthogonal, N, N, 3});
  Rng rng(4);
  const Vector y = gaussian_vector(rng, N);
  const int M = 5;
  const auto rec = omp_decode(Phi, y, OmpOptions{M, 1e-12});
  const Vector h = transpose_matvec(Phi, y);
  const auto topM = best_k_term(h, M, 2.0);
  EXPECT_EQ(rec.selected.indices(), topM.kept.indices());
  for (int j : topM.kept) EXPECT_NEAR(rec.estimate[j], h[j], 1e-10);
}

TEST(OmpDecode, DeterministicTraces) {
  const DenseMatrix Phi = generate(MatrixSpec{Ensemble::gaussian, 12, 30, 9});
  Rng rng(10);
  const Vector y = gaussian_vector(rng, 12);
  const auto a = omp_decode(Phi, y, OmpOptions{6, 1e-12});
  const auto b = omp_decode(Phi, y, OmpOptions{6, 1e-12});
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.chosen_order, b.chosen_order);
  EXPECT_EQ(a.residual_norms, b.residual_norms);
}

TEST(OmpDecode, NearDuplicateColumnsDoNotStall) {
  // Column 3 is a near-duplicate of column 0 with a sliver of reach into the
  // fourth coordinate, so correlations stay nonzero and the decoder ends up
  // selecting a numerically dependent column.
  DenseMatrix Phi(4, 4);
  Phi(0, 0) = 1.0;
  Phi(1, 1) = 1.0;
  Phi(2, 2) = 1.0;
  Phi(0, 3) = 1.0;
  Phi(3, 3) = 1e-13;
  const Vector y{2.0, 1.0, 0.5, 0.25};
  const auto rec = omp_decode(Phi, y, OmpOptions{4, 0.0});
  EXPECT_EQ(rec.iterations_run, 4);
  for (std::size_t i = 1; i < rec.residual_norms.size(); ++i) {
    EXPECT_LE(rec.residual_norms[i], rec.residual_norms[i - 1] + 1e-9);
  }
  // all of y except the fourth coordinate is reachable
  EXPECT_NEAR(rec.residual_norms.back(), 0.25, 1e-10);
  const Vector fit = matvec(Phi, rec.estimate);
  EXPECT_NEAR(fit[0], 2.0, 1e-10);
  EXPECT_NEAR(fit[1], 1.0, 1e-10);
  EXPECT_NEAR(fit[2], 0.5, 1e-10);
}

TEST(OmpDecode, ContractViolations) {
  const DenseMatrix I = DenseMatrix::identity(3);
  EXPECT_THROW(omp_decode(I, {1.0, 2.0}, OmpOptions{1, 1e-12}), ContractViolation);
  EXPECT_THROW(omp_decode(I, {1.0, 2.0, 3.0}, OmpOptions{4, 1e-12}), ContractViolation);
  EXPECT_THROW(omp_decode(I, {1.0, 2.0, 3.0}, OmpOptions{0, 1e-12}), ContractViolation);
  EXPECT_THROW(omp_decode(I, {1.0, 2.0, 3.0}, OmpOptions{1, -1.0}), ContractViolation);
}
