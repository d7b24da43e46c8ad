#include <gtest/gtest.h>

#include <cmath>

#include "mbthp/channel.hpp"
#include "mbthp/errors.hpp"
#include "test_support.hpp"

namespace mbthp {
namespace {

TEST(ExponentialCorrelation, Examples) {
  EXPECT_EQ(exponential_correlation(4, 0.0), CMatrix::Identity(4, 4));
  const double a = 0.3;
  const CMatrix r = exponential_correlation(4, a);
  EXPECT_NEAR(r(0, 1).real(), a, 1e-15);
  EXPECT_NEAR(r(0, 2).real(), a * a, 1e-15);
  EXPECT_NEAR(r(0, 3).real(), a * a * a, 1e-15);
  const CMatrix h = exponential_correlation(3, 0.5);
  const double expected[3][3] = {{1, .5, .25}, {.5, 1, .5}, {.25, .5, 1}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(h(i, j).real(), expected[i][j]);
  }
  EXPECT_THROW(exponential_correlation(3, 1.0), ContractViolation);
  EXPECT_THROW(exponential_correlation(3, -0.1), ContractViolation);
}

TEST(BuildStatistics, WhiteAndZeroError) {
  const ChannelStatistics s = build_statistics({4, 4, 4}, 0.0, 0.0, 0.001);
  EXPECT_EQ(s.psi_sr, CMatrix::Identity(4, 4));
  EXPECT_LT((s.sigma_sr - 0.001 * CMatrix::Identity(4, 4)).norm(), 1e-18);
  EXPECT_LT((s.sigma_rd - 0.001 * CMatrix::Identity(4, 4)).norm(), 1e-18);
  const ChannelStatistics z = build_statistics({4, 4, 4}, 0.0, 0.0, 0.0);
  EXPECT_EQ(z.sigma_sr.norm(), 0.0);
  const ChannelStatistics c = build_statistics({4, 4, 4}, 0.5, 0.0, 0.01);
  EXPECT_LT((c.psi_sr - exponential_correlation(4, 0.5)).norm(), 1e-15);
  EXPECT_LT((c.sigma_sr - 0.01 * CMatrix::Identity(4, 4)).norm(), 1e-18);
}

TEST(SampleRealization, ExactSumAndDeterminism) {
  const ChannelStatistics s = build_statistics({4, 3, 2}, 0.2, 0.3, 0.01);
  const ChannelRealization a = sample_realization(s, 5, 17);
  const ChannelRealization b = sample_realization(s, 5, 17);
  EXPECT_EQ(a.h_sr, b.h_sr);
  EXPECT_EQ(a.h_rd, b.h_rd);
  EXPECT_EQ(a.h_sr, CMatrix(a.hbar_sr + a.dh_sr));
  EXPECT_EQ(a.h_rd, CMatrix(a.hbar_rd + a.dh_rd));
  EXPECT_EQ(a.hbar_sr.rows(), 3);
  EXPECT_EQ(a.hbar_sr.cols(), 4);
  EXPECT_EQ(a.hbar_rd.rows(), 2);
  EXPECT_EQ(a.hbar_rd.cols(), 3);
  const ChannelRealization c = sample_realization(s, 5, 18);
  EXPECT_NE(a.h_sr, c.h_sr);
}

TEST(SampleRealization, PerfectCsiHasNoError) {
  const ChannelStatistics s = build_statistics({4, 4, 4}, 0.0, 0.0, 0.0);
  const ChannelRealization r = sample_realization(s, 1, 1);
  EXPECT_EQ(r.dh_sr.norm(), 0.0);
  EXPECT_EQ(r.h_sr, r.hbar_sr);
}

TEST(SampleRealization, RejectsUnitErrorVariance) {
  ChannelStatistics s = build_statistics({2, 2, 2}, 0.0, 0.0, 0.0);
  s.sigma_e2 = 1.0;
  EXPECT_THROW(sample_realization(s, 1, 1), ContractViolation);
}

TEST(SampleRealization, TrueChannelHasUnitVariance) {
  const ChannelStatistics s = build_statistics({4, 4, 4}, 0.0, 0.0, 0.001);
  double acc = 0.0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const ChannelRealization r = sample_realization(s, 99, static_cast<std::uint64_t>(t));
    acc += r.h_sr.squaredNorm() / 16.0;
  }
  const double var = acc / draws;
  EXPECT_GE(var, 0.98);
  EXPECT_LE(var, 1.02);
}

TEST(KroneckerDraw, ErrorCovarianceMatchesKroneckerProduct) {
  // vec(dH) has covariance Psi^T (x) Sigma for dH = Sigma^{1/2} G Psi^{T/2}.
  const CMatrix psi = exponential_correlation(3, 0.6);
  const CMatrix sigma = 0.05 * testing::random_pd(2, 8, 0.5);
  const CMatrix sq_s = sqrt_psd(sigma);
  const CMatrix sq_p = sqrt_psd(psi);
  RngStream rng({3, 0, StreamId::kAuxiliary});
  const int draws = 20000;
  CMatrix acc = CMatrix::Zero(6, 6);
  for (int i = 0; i < draws; ++i) {
    const CMatrix d = kronecker_draw(sq_s, sq_p, rng);
    const Eigen::Map<const CVector> v(d.data(), 6);
    acc += v * v.adjoint();
  }
  acc /= draws;
  CMatrix expected(6, 6);
  const CMatrix pt = psi.transpose();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) expected.block(2 * a, 2 * b, 2, 2) = pt(a, b) * sigma;
  }
  EXPECT_LE((acc - expected).norm() / expected.norm(), 0.05);
}

}  // namespace
}  // namespace mbthp
