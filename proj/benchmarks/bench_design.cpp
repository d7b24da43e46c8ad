// Per-branch design, GMD and branch selection timings at 4x4x4.

#include <benchmark/benchmark.h>

#include <vector>

#include "mbthp/channel.hpp"
#include "mbthp/design.hpp"
#include "mbthp/linalg.hpp"
#include "mbthp/multibranch.hpp"
#include "mbthp/rng.hpp"
#include "mbthp/simulation.hpp"

namespace {

using namespace mbthp;

SystemModel bench_model(CovarianceCase cov) {
  SimConfig c;
  c.covariance = cov;
  c.beta = cov == CovarianceCase::kA ? 0.5 : 0.0;
  c.alpha = cov == CovarianceCase::kB ? 0.5 : 0.0;
  return make_model(c, 15.0);
}

void BM_DesignBranch(benchmark::State& state) {
  const auto cov = state.range(0) == 0 ? CovarianceCase::kA : CovarianceCase::kB;
  const SystemModel m = bench_model(cov);
  const ChannelRealization ch = sample_realization(m.stats, 1, 0);
  const OrderingPattern p = identity_pattern(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(design_branch(cov, m, ch.hbar_sr, ch.hbar_rd, p));
  }
}
BENCHMARK(BM_DesignBranch)->Arg(0)->Arg(1);

void BM_Gmd(benchmark::State& state) {
  RngStream rng({2, 0, StreamId::kAuxiliary});
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const CMatrix a = rng.complex_gaussian(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(gmd(a));
}
BENCHMARK(BM_Gmd)->Arg(4)->Arg(8);

void BM_SelectBranch(benchmark::State& state) {
  const SystemModel m = bench_model(CovarianceCase::kA);
  const ChannelRealization ch = sample_realization(m.stats, 3, 0);
  const BranchCodebook cb = exhaustive_codebook(4);
  std::vector<BranchDesign> designs;
  for (std::size_t l = 0; l < static_cast<std::size_t>(state.range(0)); ++l) {
    designs.push_back(
        design_branch(CovarianceCase::kA, m, ch.hbar_sr, ch.hbar_rd, cb.patterns[l]));
  }
  RngStream rng({4, 0, StreamId::kAuxiliary});
  std::vector<CVector> block;
  for (int k = 0; k < 100; ++k) {
    CVector s(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
      s(i) = Complex(2.0 * static_cast<int>(rng.uniform() * 4.0) - 3.0,
                     2.0 * static_cast<int>(rng.uniform() * 4.0) - 3.0);
    }
    block.push_back(s);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_branch(designs, block, ch.hbar_sr, ch.hbar_rd, 16));
  }
}
BENCHMARK(BM_SelectBranch)->Arg(4)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
