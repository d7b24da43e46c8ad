#include "mbthp/simulation.hpp"

#include <cmath>

#include "mbthp/channel.hpp"
#include "mbthp/errors.hpp"
#include "mbthp/parallel.hpp"
#include "mbthp/thp.hpp"

namespace mbthp {
namespace {

// Separates FSB training channels from the simulation channels of the same seed.
constexpr std::uint64_t kFsbSeedSalt = 0x66736274726169ULL;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ChannelStatistics stats_for(const SimConfig& c) {
  return build_statistics(c.dims, c.alpha, c.beta, c.sigma_e2);
}

std::vector<BranchDesign> design_all(const SimConfig& c, const SystemModel& model,
                                     const BranchCodebook& codebook, const CMatrix& hbar_sr,
                                     const CMatrix& hbar_rd) {
  std::vector<BranchDesign> designs;
  designs.reserve(codebook.size());
  for (const auto& p : codebook.patterns) {
    designs.push_back(design_branch(c.covariance, model, hbar_sr, hbar_rd, p));
  }
  return designs;
}

std::vector<CVector> random_block(const QamConstellation& qam, std::size_t k, std::size_t n_d,
                                  RngStream& rng, std::vector<std::uint8_t>* bits_out) {
  const std::size_t per_vector = n_d * qam.bits_per_symbol();
  std::vector<CVector> block;
  block.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::uint8_t> bits(per_vector);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.engine()() >> 63);
    const auto sym = qam.map(bits);
    CVector s(static_cast<Eigen::Index>(n_d));
    for (std::size_t j = 0; j < n_d; ++j) s(static_cast<Eigen::Index>(j)) = sym[j];
    block.push_back(std::move(s));
    if (bits_out) bits_out->insert(bits_out->end(), bits.begin(), bits.end());
  }
  return block;
}

CVector noise_vector(Eigen::Index n, double power, RngStream& rng) {
  const double scale = std::sqrt(power);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.complex_normal();
  return v;
}

std::uint64_t count_errors(const QamConstellation& qam, const CVector& detected,
                           const std::uint8_t* sent) {
  std::vector<Complex> sym(detected.data(), detected.data() + detected.size());
  const auto bits = qam.demap(sym);
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) e += bits[i] != sent[i];
  return e;
}

}  // namespace

SystemModel make_model(const SimConfig& config, double snr_rd_db) {
  SystemModel m;
  m.stats = stats_for(config);
  m.budget.noise_sr = 1.0;
  m.budget.noise_rd = 1.0;
  m.budget.p_s = db_to_linear(config.snr_sr_db) * m.budget.noise_sr;
  m.budget.p_r = db_to_linear(snr_rd_db) * m.budget.noise_rd;
  m.sigma_s2 = QamConstellation(config.m).sigma_s2();
  return m;
}

FsbTraining train_fsb(const SimConfig& config, std::uint64_t n_e) {
  validate(config);
  const std::size_t n = config.dims.n_d;
  const BranchCodebook all = exhaustive_codebook(n);
  const SystemModel model = make_model(config, config.snr_rd_db.front());
  const QamConstellation qam(config.m);
  const std::uint64_t seed = splitmix64(config.seed ^ kFsbSeedSalt);
  auto evaluator = [&](std::uint64_t e) -> std::size_t {
    const ChannelRealization ch = sample_realization(model.stats, seed, e);
    const auto designs = design_all(config, model, all, ch.hbar_sr, ch.hbar_rd);
    RngStream rng({seed, e, StreamId::kFsbTraining});
    const auto block = random_block(qam, config.k, n, rng, nullptr);
    return select_branch(designs, block, ch.hbar_sr, ch.hbar_rd, config.m).l_opt;
  };
  return fsb_train(n, config.l, n_e, evaluator, config.threads);
}

BranchCodebook build_codebook(const SimConfig& config) {
  const std::size_t n = config.dims.n_d;
  switch (config.scheme) {
    case CodebookScheme::kSingle: return single_codebook(n);
    case CodebookScheme::kExhaustive: return exhaustive_codebook(n);
    case CodebookScheme::kPsp: return psp_codebook(n, config.l);
    case CodebookScheme::kFsb:
      if (!config.fsb_codebook.empty()) {
        const FsbFile f = read_fsb_file(config.fsb_codebook);
        if (f.n_s != n || f.l != config.l) {
          throw ContractViolation("FSB file " + config.fsb_codebook +
                                  " does not match n_d and L of the configuration");
        }
        return f.codebook;
      }
      return train_fsb(config, config.fsb_experiments).codebook;
  }
  return single_codebook(n);
}

double si_bit_flip_probability(double rate, unsigned bits) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ContractViolation("SI error rate must lie in [0, 1]");
  if (bits == 0) return 0.0;
  return 1.0 - std::pow(1.0 - rate, 1.0 / static_cast<double>(bits));
}

std::size_t inject_si_error(std::size_t l_opt, std::size_t l_total, double rate, RngStream& rng) {
  if (l_opt >= l_total) throw ContractViolation("branch index out of range");
  const unsigned bits = feedforward_bits(l_total);
  const double p = si_bit_flip_probability(rate, bits);
  auto word = encode_index(l_opt, bits);
  for (auto& b : word) {
    if (rng.bernoulli(p)) b ^= 1u;
  }
  return decode_index(word) % l_total;
}

BranchDesign naf_design(const SystemModel& model, const CMatrix& hbar_sr,
                        const CMatrix& hbar_rd) {
  const auto ns = static_cast<Eigen::Index>(model.stats.dims.n_s);
  const auto nr = static_cast<Eigen::Index>(model.stats.dims.n_r);
  const auto nd = static_cast<Eigen::Index>(model.stats.dims.n_d);
  BranchDesign d;
  d.order = identity_pattern(model.stats.dims.n_d);
  d.u = CMatrix::Identity(nd, nd);
  d.phi_s = CMatrix::Identity(nd, nd);
  d.f_s = std::sqrt(model.budget.p_s / (model.sigma_s2 * static_cast<double>(nd))) *
          CMatrix::Identity(ns, nd);
  const CMatrix unit = CMatrix::Identity(nr, nr);
  const double g2 = model.budget.p_r / relay_expected_power(model, hbar_sr, d.f_s, unit);
  d.f_r = std::sqrt(g2) * unit;
  d.w = mmse_receiver(model, hbar_sr, hbar_rd, d.order, d.f_s, d.f_r, d.u);
  d.state.converged = true;
  return d;
}

BlockOutcome run_block(const SimConfig& config, const BranchCodebook& codebook,
                       double snr_rd_db, std::uint64_t trial) {
  const SystemModel model = make_model(config, snr_rd_db);
  const QamConstellation qam(config.m);
  const ChannelRealization ch = sample_realization(model.stats, config.seed, trial);
  const std::size_t n_d = config.dims.n_d;

  RngStream data_rng({config.seed, trial, StreamId::kData});
  std::vector<std::uint8_t> bits;
  const auto block = random_block(qam, config.k, n_d, data_rng, &bits);
  const std::size_t bits_per_vector = n_d * qam.bits_per_symbol();

  BlockOutcome out;
  RngStream noise_rng({config.seed, trial, StreamId::kNoise});
  const auto nr = static_cast<Eigen::Index>(config.dims.n_r);
  const auto nd = static_cast<Eigen::Index>(n_d);

  if (config.baseline == Baseline::kNaf) {
    const BranchDesign d = naf_design(model, ch.hbar_sr, ch.hbar_rd);
    for (std::size_t k = 0; k < block.size(); ++k) {
      const CVector yr = ch.h_sr * d.f_s * block[k] + noise_vector(nr, model.budget.noise_sr, noise_rng);
      const CVector yd = ch.h_rd * d.f_r * yr + noise_vector(nd, model.budget.noise_rd, noise_rng);
      const CVector est = d.w * yd;
      out.squared_error += (est - block[k]).squaredNorm();
      out.errors += count_errors(qam, slice(est, qam), bits.data() + k * bits_per_vector);
    }
    out.bits = bits.size();
    out.vectors = block.size();
    return out;
  }

  const SystemModel design_model =
      config.baseline == Baseline::kThpNonrobust ? nonrobust_model(model) : model;
  const auto designs = design_all(config, design_model, codebook, ch.hbar_sr, ch.hbar_rd);
  for (const auto& d : designs) out.converged = out.converged && d.state.converged;

  const SelectionOutcome sel =
      select_branch(designs, block, ch.hbar_sr, ch.hbar_rd, config.m);
  out.l_opt = sel.l_opt;
  RngStream si_rng({config.seed, trial, StreamId::kSideInfo});
  out.l_used = inject_si_error(sel.l_opt, designs.size(), config.si_error_rate, si_rng);

  const BranchDesign& src = designs[out.l_opt];
  const BranchDesign& dst = designs[out.l_used];
  for (std::size_t k = 0; k < block.size(); ++k) {
    const ThpEncoding enc = thp_encode(block[k], src.order, src.u, config.m);
    const CVector yr = ch.h_sr * src.f_s * enc.xbar + noise_vector(nr, model.budget.noise_sr, noise_rng);
    const CVector yd = ch.h_rd * dst.f_r * yr + noise_vector(nd, model.budget.noise_rd, noise_rng);
    const CVector v_hat = dst.w * (dst.order.t * yd);
    out.squared_error += (v_hat - enc.v).squaredNorm();
    const CVector s_hat = receiver_detect(v_hat, dst.order, qam);
    out.errors += count_errors(qam, s_hat, bits.data() + k * bits_per_vector);
  }
  out.bits = bits.size();
  out.vectors = block.size();
  return out;
}

std::string scheme_label(const SimConfig& config) {
  if (config.baseline == Baseline::kMbthp) return std::string(to_string(config.scheme));
  return std::string(to_string(config.baseline));
}

SimResult sweep(const SimConfig& config, const BranchCodebook& codebook) {
  validate(config);
  SimResult result;
  result.config = config;
  result.label = scheme_label(config);
  const bool single = config.baseline == Baseline::kThpSingle || config.baseline == Baseline::kNaf;
  const BranchCodebook used = single ? single_codebook(config.dims.n_d) : codebook;
  if (used.size() == 0 || used.patterns.front().perm.size() != config.dims.n_d) {
    throw ContractViolation("codebook does not match n_d");
  }
  result.branches = used.size();

  for (double snr : config.snr_rd_db) {
    std::vector<BlockOutcome> blocks(config.blocks);
    parallel_for(config.blocks, config.threads,
                 [&](std::size_t t) { blocks[t] = run_block(config, used, snr, t); });
    PointResult p;
    p.snr_rd_db = snr;
    p.block_count = config.blocks;
    p.branch_histogram.assign(used.size(), 0);
    p.block_errors.reserve(blocks.size());
    double sq = 0.0;
    std::uint64_t vectors = 0;
    for (const auto& b : blocks) {
      p.bit_count += b.bits;
      p.error_count += b.errors;
      p.converged_blocks += b.converged ? 1 : 0;
      p.block_errors.push_back(b.errors);
      ++p.branch_histogram[b.l_opt];
      sq += b.squared_error;
      vectors += b.vectors;
    }
    p.ber = static_cast<double>(p.error_count) / static_cast<double>(p.bit_count);
    p.mse = sq / static_cast<double>(vectors);
    p.converged_fraction =
        static_cast<double>(p.converged_blocks) / static_cast<double>(p.block_count);
    result.points.push_back(std::move(p));
  }
  return result;
}

SimResult sweep(const SimConfig& config) {
  validate(config);
  const bool single = config.baseline == Baseline::kThpSingle || config.baseline == Baseline::kNaf;
  return sweep(config, single ? single_codebook(config.dims.n_d) : build_codebook(config));
}

double empirical_mse(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                     const BranchDesign& design, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw ContractViolation("need at least one sample");
  const auto& st = model.stats;
  const CMatrix err_sr = sqrt_psd(st.sigma_sr);
  const CMatrix err_rd = sqrt_psd(st.sigma_rd);
  const CMatrix psi_sr = sqrt_psd(st.psi_sr);
  const CMatrix psi_rd = sqrt_psd(st.psi_rd);
  const auto nr = hbar_sr.rows();
  const auto nd = hbar_rd.rows();
  const auto streams = design.f_s.cols();
  const double xs = std::sqrt(model.sigma_s2);

  RngStream rng({seed, 0, StreamId::kAuxiliary});
  double total = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const CMatrix h_sr = hbar_sr + kronecker_draw(err_sr, psi_sr, rng);
    const CMatrix h_rd = hbar_rd + kronecker_draw(err_rd, psi_rd, rng);
    CVector x(streams);
    for (Eigen::Index j = 0; j < streams; ++j) x(j) = xs * rng.complex_normal();
    const CVector yr = h_sr * design.f_s * x + noise_vector(nr, model.budget.noise_sr, rng);
    const CVector yd = h_rd * design.f_r * yr + noise_vector(nd, model.budget.noise_rd, rng);
    const CVector e = design.w * (design.order.t * yd) - design.u * x;
    total += e.squaredNorm();
  }
  return total / static_cast<double>(samples);
}

PairedDifference paired_ber_difference(const PointResult& a, const PointResult& b) {
  if (a.block_errors.size() != b.block_errors.size() || a.block_errors.empty()) {
    throw ContractViolation("paired comparison needs equal, non-empty block counts");
  }
  if (a.bit_count != b.bit_count) throw ContractViolation("paired results differ in bit count");
  const double n = static_cast<double>(a.block_errors.size());
  const double bits_per_block = static_cast<double>(a.bit_count) / n;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < a.block_errors.size(); ++i) {
    const double d = (static_cast<double>(a.block_errors[i]) -
                      static_cast<double>(b.block_errors[i])) / bits_per_block;
    sum += d;
    sum2 += d * d;
  }
  PairedDifference out;
  out.mean = sum / n;
  const double var = n > 1 ? (sum2 - n * out.mean * out.mean) / (n - 1.0) : 0.0;
  out.standard_error = std::sqrt(std::max(var, 0.0) / n);
  return out;
}

}  // namespace mbthp
