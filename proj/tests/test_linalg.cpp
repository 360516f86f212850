#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>

#include "nlwave/linalg.hpp"
#include "nlwave/rng.hpp"

using namespace nlwave;

namespace {

Matrix random_spd(Rng& rng, Eigen::Index n) {
  const Matrix g = rng.gaussian_matrix(n, n);
  return g * g.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
}

}  // namespace

TEST(Lu, DeterminantMatchesEigen) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 10;
    const Matrix a = rng.gaussian_matrix(n, n);
    const double ref = a.partialPivLu().determinant();
    EXPECT_NEAR(linalg::lu_determinant(a), ref, 1e-10 * std::max(1.0, std::abs(ref))) << "n=" << n;
  }
}

TEST(Lu, FactorsReconstructPermutedMatrix) {
  Rng rng(12);
  const Matrix a = rng.gaussian_matrix(6, 6);
  const auto f = linalg::lu_factor(a);
  EXPECT_LT((f.permutation() * a - f.lower() * f.upper()).norm(), 1e-12 * a.norm());
  EXPECT_LT(f.weak_pivot(), 0);
}

TEST(Lu, SolveAndInverse) {
  Rng rng(13);
  const Matrix a = random_spd(rng, 7);
  const Vector b = rng.gaussian_vector(7);
  EXPECT_LT((a * linalg::solve(a, b) - b).norm(), 1e-12 * b.norm() * a.norm());
  EXPECT_LT((linalg::inverse(a) * a - Matrix::Identity(7, 7)).norm(), 1e-12);
}

TEST(Lu, SingularMatrixRaisesWithPivot) {
  Matrix a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 1, 0, 1;
  const auto f = linalg::lu_factor(a);
  EXPECT_GE(f.weak_pivot(), 0);
  EXPECT_THROW(f.solve(Vector::Ones(3)), SingularityError);
  EXPECT_NEAR(f.determinant(), 0.0, 1e-12);
}

TEST(Lu, RejectsNonSquare) {
  EXPECT_THROW(linalg::lu_factor(Matrix::Zero(2, 3)), DimensionError);
  EXPECT_THROW(linalg::lu_factor(Matrix(0, 0)), DimensionError);
  EXPECT_THROW(linalg::solve(Matrix::Identity(3, 3), Vector::Ones(2)), DimensionError);
}

TEST(Lu, WorksInLongDouble) {
  MatrixX<long double> a(2, 2);
  a << 2, 1, 1, 3;
  EXPECT_NEAR(static_cast<double>(linalg::lu_determinant(a)), 5.0, 1e-15);
}

TEST(SymEigen, MatchesSelfAdjointSolver) {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 9;
    const Matrix g = rng.gaussian_matrix(n, n);
    const Matrix s = g + g.transpose();
    const auto mine = linalg::sym_eigen(s);
    Eigen::SelfAdjointEigenSolver<Matrix> ref(s);
    EXPECT_LT((mine.eigenvalues - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-11 * std::max(1.0, s.norm()));
    const Matrix rebuilt = mine.eigenvectors * mine.eigenvalues.asDiagonal() * mine.eigenvectors.transpose();
    EXPECT_LT((rebuilt - s).norm(), 1e-11 * std::max(1.0, s.norm()));
    EXPECT_TRUE(std::is_sorted(mine.eigenvalues.data(), mine.eigenvalues.data() + n));
  }
}

TEST(SymEigen, ApplyComputesMatrixFunction) {
  Rng rng(15);
  const Matrix a = random_spd(rng, 5);
  const Matrix root = linalg::sym_eigen(a).apply([](double l) { return std::sqrt(l); });
  EXPECT_LT((root * root - a).norm(), 1e-11 * a.norm());
}

TEST(SymEigen, RejectsAsymmetric) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(linalg::sym_eigen(a), ContractError);
}

TEST(GeneralEigen, MatchesEigenSolverAsMultiset) {
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 12;
    const Matrix a = rng.gaussian_matrix(n, n);
    ComplexList mine = linalg::general_eigenvalues(a);
    Eigen::EigenSolver<Matrix> es(a, false);
    ComplexList ref(es.eigenvalues().data(), es.eigenvalues().data() + n);
    ASSERT_EQ(mine.size(), ref.size());
    // greedy matching
    std::vector<bool> used(ref.size(), false);
    for (const auto& z : mine) {
      double best = 1e300;
      std::size_t bi = 0;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!used[j] && std::abs(z - ref[j]) < best) {
          best = std::abs(z - ref[j]);
          bi = j;
        }
      }
      used[bi] = true;
      EXPECT_LT(best, 1e-8 * std::max(1.0, a.norm())) << "n=" << n;
    }
  }
}

TEST(GeneralEigen, HessenbergIsSimilarAndBanded) {
  Rng rng(17);
  const Matrix a = rng.gaussian_matrix(7, 7);
  const Matrix h = linalg::hessenberg(a);
  for (Eigen::Index i = 2; i < 7; ++i)
    for (Eigen::Index j = 0; j < i - 1; ++j) EXPECT_EQ(h(i, j), 0.0);
  EXPECT_NEAR(h.trace(), a.trace(), 1e-12 * a.norm());
  EXPECT_NEAR(linalg::lu_determinant(h), linalg::lu_determinant(a), 1e-10 * std::abs(linalg::lu_determinant(a)));
}

TEST(GeneralEigen, RotationHasImaginaryPair) {
  Matrix a(2, 2);
  a << 0, -1, 1, 0;
  const auto ev = linalg::general_eigenvalues(a);
  ASSERT_EQ(ev.size(), 2u);
  for (const auto& z : ev) {
    EXPECT_NEAR(z.real(), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(z.imag()), 1.0, 1e-14);
  }
}

TEST(BlockHelpers, ComposeAndReversal) {
  const Matrix a = Matrix::Constant(2, 2, 1), b = Matrix::Constant(2, 2, 2), c = Matrix::Constant(2, 2, 3),
               d = Matrix::Constant(2, 2, 4);
  const Matrix m = linalg::compose_blocks(a, b, c, d);
  EXPECT_EQ(m(0, 0), 1);
  EXPECT_EQ(m(0, 3), 2);
  EXPECT_EQ(m(3, 0), 3);
  EXPECT_EQ(m(3, 3), 4);
  const Matrix swapped = m * linalg::reversal_matrix(2);
  EXPECT_EQ(swapped(0, 0), 2);
  EXPECT_EQ(swapped(3, 3), 3);
}
