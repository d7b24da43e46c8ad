#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "mbthp/channel.hpp"
#include "mbthp/errors.hpp"
#include "mbthp/multibranch.hpp"
#include "mbthp/thp.hpp"
#include "test_support.hpp"

namespace mbthp {
namespace {

using Perm = std::vector<std::size_t>;

std::vector<Perm> perms_of(const BranchCodebook& cb) {
  std::vector<Perm> out;
  for (const auto& p : cb.patterns) out.push_back(p.perm);
  return out;
}

TEST(Codebook, ExhaustiveHasAllDistinctPermutations) {
  const BranchCodebook cb = exhaustive_codebook(4);
  ASSERT_EQ(cb.size(), 24u);
  EXPECT_EQ(cb.patterns.front().perm, (Perm{0, 1, 2, 3}));
  std::set<Perm> seen;
  for (const auto& p : cb.patterns) {
    seen.insert(p.perm);
    EXPECT_EQ(p.t * p.t.transpose(), CMatrix::Identity(4, 4));
  }
  EXPECT_EQ(seen.size(), 24u);
}

TEST(Codebook, SingleIsIdentity) {
  const BranchCodebook cb = single_codebook(3);
  ASSERT_EQ(cb.size(), 1u);
  EXPECT_EQ(cb.patterns[0].t, CMatrix::Identity(3, 3));
}

TEST(Codebook, PspFourBranchesMatchDisplayedMatrices) {
  const BranchCodebook cb = psp_codebook(4, 4);
  const std::vector<Perm> expected{{0, 1, 2, 3}, {3, 2, 1, 0}, {0, 3, 2, 1}, {0, 1, 3, 2}};
  EXPECT_EQ(perms_of(cb), expected);
  // T^(4) swaps positions 3 and 4.
  CMatrix t4 = CMatrix::Zero(4, 4);
  t4(0, 0) = t4(1, 1) = t4(2, 3) = t4(3, 2) = 1.0;
  EXPECT_EQ(cb.patterns[3].t, t4);
}

TEST(Codebook, PspShiftAndSecondPatternIsReversal) {
  // L = 3: s = floor((3 - 2) * 4 / 3) = 1.
  EXPECT_EQ(psp_codebook(4, 3).patterns[2].perm, (Perm{0, 3, 2, 1}));
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto p = psp_codebook(n, 2).patterns[1].perm;
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(p[i], n - 1 - i);
  }
  EXPECT_EQ(psp_codebook(4, 1).size(), 1u);
}

TEST(Codebook, PspBeyondStreamCountStaysDistinct) {
  for (std::size_t l : {5u, 8u, 12u, 24u}) {
    const BranchCodebook cb = psp_codebook(4, l);
    ASSERT_EQ(cb.size(), l);
    const auto p = perms_of(cb);
    EXPECT_EQ(std::set<Perm>(p.begin(), p.end()).size(), l);
  }
  EXPECT_THROW(psp_codebook(4, 25), ContractViolation);
  EXPECT_THROW(psp_codebook(4, 0), ContractViolation);
}

TEST(Codebook, SchemeNames) {
  for (auto s : {CodebookScheme::kExhaustive, CodebookScheme::kPsp, CodebookScheme::kFsb,
                 CodebookScheme::kSingle}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_THROW(parse_scheme("vblast"), ContractViolation);
}

TEST(Feedforward, BitsAndEfficiency) {
  EXPECT_EQ(feedforward_bits(1), 0u);
  EXPECT_EQ(feedforward_bits(2), 1u);
  EXPECT_EQ(feedforward_bits(4), 2u);
  EXPECT_EQ(feedforward_bits(5), 3u);
  EXPECT_EQ(feedforward_bits(24), 5u);
  const Ratio r = feedforward_efficiency_ratio(4, 100, 16, 5);
  EXPECT_EQ(r.num, 1600u);
  EXPECT_EQ(r.den, 1605u);
  EXPECT_DOUBLE_EQ(feedforward_efficiency(4, 100, 16, 0), 1.0);
  double prev = 0.0;
  for (std::uint64_t k = 1; k <= 1024; k *= 2) {
    const double e = feedforward_efficiency(4, k, 16, 5);
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(Feedforward, IndexBitsBigEndian) {
  EXPECT_EQ(encode_index(5, 3), (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(decode_index({1, 1, 0}), 6u);
  EXPECT_THROW(encode_index(8, 3), ContractViolation);
}

struct Scenario {
  SystemModel model;
  ChannelRealization ch;
  std::vector<CVector> block;
};

Scenario scenario(std::uint64_t seed) {
  Scenario s;
  s.model.stats = build_statistics({4, 4, 4}, 0.0, 0.0, 0.001);
  s.model.budget.p_s = 1000.0;
  s.model.budget.p_r = std::pow(10.0, 1.5);
  s.model.sigma_s2 = 10.0;
  s.ch = sample_realization(s.model.stats, seed, 0);
  const QamConstellation q(16);
  RngStream rng({seed, 0, StreamId::kData});
  for (int k = 0; k < 20; ++k) {
    std::vector<std::uint8_t> bits(16);
    for (auto& b : bits) b = rng.bernoulli(0.5);
    const auto sym = q.map(bits);
    s.block.push_back(Eigen::Map<const CVector>(sym.data(), 4));
  }
  return s;
}

// Direct evaluation of the selection metric with every matrix written out.
double brute_force_distance(const BranchDesign& d, const Scenario& s) {
  double total = 0.0;
  const double w2 = 8.0;
  for (const CVector& sym : s.block) {
    CVector sbar = d.order.t * sym;
    CVector x(4);
    for (int k = 0; k < 4; ++k) {
      Complex pre = sbar(k);
      for (int j = 0; j < k; ++j) pre -= d.u(k, j) * x(j);
      x(k) = Complex(pre.real() - w2 * std::floor((pre.real() + 4.0) / w2),
                     pre.imag() - w2 * std::floor((pre.imag() + 4.0) / w2));
    }
    const CVector y = d.w * d.order.t * s.ch.hbar_rd * d.f_r * s.ch.hbar_sr * d.f_s * x;
    CVector m(4);
    for (int k = 0; k < 4; ++k) {
      m(k) = Complex(y(k).real() - w2 * std::floor((y(k).real() + 4.0) / w2),
                     y(k).imag() - w2 * std::floor((y(k).imag() + 4.0) / w2));
    }
    total += (sym - d.order.t.transpose() * m).squaredNorm();
  }
  return total;
}

TEST(SelectBranch, MatchesBruteForceOnTwoBranches) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = scenario(seed);
    std::vector<BranchDesign> designs;
    for (const auto& p : psp_codebook(4, 2).patterns) {
      designs.push_back(design_case_a(s.model, s.ch.hbar_sr, s.ch.hbar_rd, p));
    }
    const SelectionOutcome out = select_branch(designs, s.block, s.ch.hbar_sr, s.ch.hbar_rd, 16);
    const double d0 = brute_force_distance(designs[0], s);
    const double d1 = brute_force_distance(designs[1], s);
    EXPECT_NEAR(out.distances[0], d0, 1e-9 * (1.0 + d0));
    EXPECT_NEAR(out.distances[1], d1, 1e-9 * (1.0 + d1));
    EXPECT_EQ(out.l_opt, d1 < d0 ? 1u : 0u);
    EXPECT_EQ(out.feedforward_bits, 1u);
  }
}

TEST(SelectBranch, SingleAndIdenticalBranches) {
  const Scenario s = scenario(7);
  const BranchDesign d = design_case_a(s.model, s.ch.hbar_sr, s.ch.hbar_rd, identity_pattern(4));
  EXPECT_EQ(select_branch({d}, s.block, s.ch.hbar_sr, s.ch.hbar_rd, 16).l_opt, 0u);
  const SelectionOutcome out = select_branch({d, d, d}, s.block, s.ch.hbar_sr, s.ch.hbar_rd, 16);
  EXPECT_EQ(out.l_opt, 0u);
}

TEST(SelectBranch, WinnerIndependentOfBranchOrder) {
  const Scenario s = scenario(8);
  const BranchCodebook cb = exhaustive_codebook(4);
  std::vector<BranchDesign> designs;
  for (const auto& p : cb.patterns) {
    designs.push_back(design_case_a(s.model, s.ch.hbar_sr, s.ch.hbar_rd, p));
  }
  const SelectionOutcome out = select_branch(designs, s.block, s.ch.hbar_sr, s.ch.hbar_rd, 16);
  EXPECT_EQ(out.distances[out.l_opt],
            *std::min_element(out.distances.begin(), out.distances.end()));
  std::vector<BranchDesign> reversed(designs.rbegin(), designs.rend());
  const SelectionOutcome rev = select_branch(reversed, s.block, s.ch.hbar_sr, s.ch.hbar_rd, 16);
  EXPECT_EQ(reversed[rev.l_opt].order.t, designs[out.l_opt].order.t);
}

TEST(Fsb, FullSizeEqualsExhaustive) {
  const FsbTraining t = fsb_train(3, 6, 10, [](std::uint64_t e) { return (e * 7) % 6; });
  const auto got = perms_of(t.codebook);
  EXPECT_EQ(std::set<Perm>(got.begin(), got.end()).size(), 6u);
}

TEST(Fsb, SingleExperimentKeepsWinnerThenIndexOrder) {
  const FsbTraining t = fsb_train(4, 3, 1, [](std::uint64_t) -> std::size_t { return 5; });
  const BranchCodebook all = exhaustive_codebook(4);
  ASSERT_EQ(t.codebook.size(), 3u);
  EXPECT_EQ(t.codebook.patterns[0].perm, all.patterns[5].perm);
  EXPECT_EQ(t.codebook.patterns[1].perm, all.patterns[0].perm);
  EXPECT_EQ(t.codebook.patterns[2].perm, all.patterns[1].perm);
}

TEST(Fsb, HistogramOrderingAndDeterminism) {
  auto eval = [](std::uint64_t e) -> std::size_t { return e % 3 == 0 ? 4 : (e % 3 == 1 ? 2 : 4); };
  const FsbTraining a = fsb_train(3, 2, 30, eval, 1);
  const FsbTraining b = fsb_train(3, 2, 30, eval, 3);
  EXPECT_EQ(a.histogram, b.histogram);
  EXPECT_EQ(perms_of(a.codebook), perms_of(b.codebook));
  const BranchCodebook all = exhaustive_codebook(3);
  EXPECT_EQ(a.codebook.patterns[0].perm, all.patterns[4].perm);
  EXPECT_EQ(a.codebook.patterns[1].perm, all.patterns[2].perm);
  EXPECT_THROW(fsb_train(3, 7, 1, eval), ContractViolation);
  EXPECT_THROW(fsb_train(3, 2, 0, eval), ContractViolation);
}

TEST(FsbFile, RoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "mbthp_fsb_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "cb.txt").string();
  FsbFile f;
  f.n_s = 4;
  f.l = 3;
  f.n_e = 100;
  f.seed = 9;
  f.codebook = psp_codebook(4, 3);
  write_fsb_file(path, f);
  {
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "fsb n_s=4 L=3 n_e=100 seed=9");
  }
  const FsbFile g = read_fsb_file(path);
  EXPECT_EQ(g.n_s, 4u);
  EXPECT_EQ(g.l, 3u);
  EXPECT_EQ(g.n_e, 100u);
  EXPECT_EQ(g.seed, 9u);
  EXPECT_EQ(perms_of(g.codebook), perms_of(f.codebook));

  const std::string bad = (dir / "bad.txt").string();
  std::ofstream(bad) << "fsb n_s=3 L=1 n_e=1 seed=0\n0 0 1\n";
  EXPECT_THROW(read_fsb_file(bad), IoError);
  EXPECT_THROW(read_fsb_file((dir / "missing.txt").string()), IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mbthp
