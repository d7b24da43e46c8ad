#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "mbthp/channel.hpp"
#include "mbthp/errors.hpp"
#include "mbthp/linalg.hpp"
#include "test_support.hpp"

namespace mbthp {
namespace {

using testing::matrix_with_condition;
using testing::random_matrix;
using testing::random_pd;

TEST(Svd, IdentityGivesIdentityFactors) {
  const CMatrix eye = CMatrix::Identity(4, 4);
  const SvdFactors f = svd(eye);
  EXPECT_LT((f.u - eye).norm(), 1e-14);
  EXPECT_LT((f.v - eye).norm(), 1e-14);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(f.sigma(i), 1.0);
}

TEST(Svd, DiagonalSortedDescending) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 0.5;
  a(1, 1) = 2.0;
  const SvdFactors f = svd(a);
  EXPECT_NEAR(f.sigma(0), 2.0, 1e-14);
  EXPECT_NEAR(f.sigma(1), 0.5, 1e-14);
}

TEST(Svd, RandomReconstructionAndUnitarity) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const CMatrix a = random_matrix(4, 4, seed);
    const SvdFactors f = svd(a);
    const CMatrix rec = f.u * f.sigma.cast<Complex>().asDiagonal() * f.v.adjoint();
    EXPECT_LE((rec - a).norm(), 1e-10 * a.norm());
    EXPECT_TRUE(is_unitary(f.u, 1e-12));
    EXPECT_TRUE(is_unitary(f.v, 1e-12));
    for (int i = 1; i < 4; ++i) EXPECT_GE(f.sigma(i - 1), f.sigma(i));
  }
}

TEST(Svd, RectangularBothOrientations) {
  for (auto [r, c] : std::array<std::pair<int, int>, 2>{{{3, 5}, {5, 3}}}) {
    const CMatrix a = random_matrix(r, c, 7);
    const SvdFactors f = svd(a);
    ASSERT_EQ(f.u.rows(), r);
    ASSERT_EQ(f.v.rows(), c);
    ASSERT_EQ(f.sigma.size(), std::min(r, c));
    CMatrix s = CMatrix::Zero(r, c);
    for (int i = 0; i < f.sigma.size(); ++i) s(i, i) = f.sigma(i);
    EXPECT_LE((f.u * s * f.v.adjoint() - a).norm(), 1e-10 * a.norm());
    EXPECT_TRUE(is_unitary(f.u, 1e-12));
    EXPECT_TRUE(is_unitary(f.v, 1e-12));
  }
}

TEST(Svd, SignConventionLargestEntryRealPositive) {
  const CMatrix a = random_matrix(4, 4, 11);
  const SvdFactors f = svd(a);
  for (int j = 0; j < 4; ++j) {
    Eigen::Index idx = 0;
    f.u.col(j).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(f.u(idx, j).real(), 0.0);
    EXPECT_NEAR(f.u(idx, j).imag(), 0.0, 1e-14);
  }
}

TEST(Svd, NonFiniteInputRejected) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(svd(a), ContractViolation);
}

TEST(Evd, IdentityAndTwoByTwoExponential) {
  const HermitianEigen e = evd_hermitian(CMatrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(e.values(i), 1.0);
  const HermitianEigen c = evd_hermitian(exponential_correlation(2, 0.5));
  EXPECT_NEAR(c.values(0), 1.5, 1e-14);
  EXPECT_NEAR(c.values(1), 0.5, 1e-14);
}

TEST(Evd, PsdFromGramHasNonNegativeSpectrum) {
  const CMatrix g = random_matrix(3, 5, 4);
  const CMatrix a = g.adjoint() * g;  // rank 3 of 5
  const HermitianEigen e = evd_hermitian(a);
  for (int i = 0; i < e.values.size(); ++i) EXPECT_GE(e.values(i), -1e-12);
  const CMatrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  EXPECT_LE((rec - a).norm(), 1e-10 * a.norm());
  EXPECT_TRUE(is_unitary(e.vectors, 1e-12));
}

TEST(Evd, NonHermitianRejected) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(evd_hermitian(a), ContractViolation);
}

TEST(Evd, DiagonalTiesKeepIndexOrder) {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  a(2, 2) = 1.0;
  const HermitianEigen e = evd_hermitian(a);
  EXPECT_DOUBLE_EQ(e.values(0), 2.0);
  EXPECT_EQ(e.vectors(1, 0), Complex(1.0));
  EXPECT_EQ(e.vectors(0, 1), Complex(1.0));
  EXPECT_EQ(e.vectors(2, 2), Complex(1.0));
}

TEST(InvSqrtPsd, DiagonalAndCongruence) {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 0.25;
  const CMatrix b = inv_sqrt_psd(d);
  EXPECT_NEAR(std::abs(b(0, 0) - 0.5), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(b(1, 1) - 2.0), 0.0, 1e-14);
  EXPECT_LT((inv_sqrt_psd(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm(), 1e-14);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CMatrix a = random_pd(4, seed);
    const CMatrix w = inv_sqrt_psd(a);
    EXPECT_LE((w * a * w.adjoint() - CMatrix::Identity(4, 4)).norm(), 1e-9);
  }
}

TEST(InvSqrtPsd, SingularRejected) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  EXPECT_THROW(inv_sqrt_psd(a), SingularMatrixError);
}

void expect_gmd_contract(const CMatrix& a, double tol) {
  const GmdFactors g = gmd(a);
  const auto n = a.rows();
  EXPECT_TRUE(is_unitary(g.q, tol));
  EXPECT_TRUE(is_unitary(g.p, tol));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) EXPECT_LE(std::abs(g.r(i, j)), tol * a.norm());
  }
  // Independent oracle: |det a|^(1/n) is the geometric mean of the singular values.
  const double target = std::pow(std::abs(a.determinant()), 1.0 / static_cast<double>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    EXPECT_NEAR(g.r(i, i).real(), target, 1e-10 * target);
    EXPECT_NEAR(g.r(i, i).imag(), 0.0, 1e-10 * target);
  }
  EXPECT_LE((g.q * g.r * g.p.adjoint() - a).norm(), 1e-9 * a.norm());
}

TEST(Gmd, IdentityIsFixedPoint) {
  const GmdFactors g = gmd(CMatrix::Identity(4, 4));
  EXPECT_LT((g.r - CMatrix::Identity(4, 4)).norm(), 1e-14);
  EXPECT_LT((g.q * g.p.adjoint() - CMatrix::Identity(4, 4)).norm(), 1e-14);
}

TEST(Gmd, TwoByTwoDiagonalEqualizesToOne) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 0.5;
  const GmdFactors g = gmd(a);
  EXPECT_NEAR(g.r(0, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(g.r(1, 1).real(), 1.0, 1e-14);
  expect_gmd_contract(a, 1e-12);
}

TEST(Gmd, RandomWellConditioned) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    expect_gmd_contract(matrix_with_condition(4, 1.0 + 99.0 * static_cast<double>(seed % 7) / 6.0, seed),
                        1e-10);
  }
}

TEST(Gmd, OtherSizesAndHighCondition) {
  expect_gmd_contract(matrix_with_condition(1, 1.0, 3), 1e-12);
  expect_gmd_contract(matrix_with_condition(3, 50.0, 4), 1e-10);
  expect_gmd_contract(matrix_with_condition(6, 1e3, 5), 1e-10);
  const GmdFactors g = gmd(matrix_with_condition(4, 1e6, 6));
  EXPECT_LE((g.q * g.r * g.p.adjoint() - matrix_with_condition(4, 1e6, 6)).norm(),
            1e-9 * matrix_with_condition(4, 1e6, 6).norm());
}

TEST(Gmd, RankDeficientRejected) {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  EXPECT_THROW(gmd(a), SingularMatrixError);
}

TEST(PermutationMatrix, IdentityAndDisplayedPatterns) {
  const std::vector<std::size_t> id{0, 1, 2, 3};
  EXPECT_EQ(permutation_matrix(id), CMatrix::Identity(4, 4));

  const std::vector<std::size_t> rev{3, 2, 1, 0};
  const CMatrix t2 = permutation_matrix(rev);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(t2(i, j), Complex(i + j == 3 ? 1.0 : 0.0));
  }
  const std::vector<std::size_t> p3{0, 3, 2, 1};
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(1, 3) = expected(2, 2) = expected(3, 1) = 1.0;
  EXPECT_EQ(permutation_matrix(p3), expected);
  EXPECT_EQ(permutation_matrix(p3) * permutation_matrix(p3).transpose(), CMatrix::Identity(4, 4));
}

TEST(PermutationMatrix, InvalidRejected) {
  const std::vector<std::size_t> dup{0, 0, 1};
  const std::vector<std::size_t> range{0, 3, 1};
  EXPECT_THROW(permutation_matrix(dup), ContractViolation);
  EXPECT_THROW(permutation_matrix(range), ContractViolation);
}

}  // namespace
}  // namespace mbthp
