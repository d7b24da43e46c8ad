#pragma once

// Monte-Carlo link simulation: per-block redesign on estimated CSI, branch
// selection, THP transmission over the true channels and BER/MSE counting.

#include <cstdint>
#include <string>
#include <vector>

#include "mbthp/config.hpp"
#include "mbthp/design.hpp"
#include "mbthp/multibranch.hpp"
#include "mbthp/rng.hpp"

namespace mbthp {

/// P_s = SNR_sr * noise, P_r = SNR_rd * noise with unit noise powers.
SystemModel make_model(const SimConfig& config, double snr_rd_db);

/// Codebook for the configured scheme. FSB loads `fsb_codebook` when set,
/// otherwise trains one with `fsb_experiments` experiments.
BranchCodebook build_codebook(const SimConfig& config);

/// FSB training on estimated channels drawn at the first SNR point, each
/// experiment scoring all n_d! orderings with the selection metric.
FsbTraining train_fsb(const SimConfig& config, std::uint64_t n_e);

/// Per-bit flip probability that makes the whole index wrong with
/// probability `rate`: 1 - (1 - rate)^(1/bits).
double si_bit_flip_probability(double rate, unsigned bits);

/// Sends l_opt through a binary symmetric channel bit by bit. A corrupted
/// index outside [0, l_total) is reduced modulo l_total.
std::size_t inject_si_error(std::size_t l_opt, std::size_t l_total, double rate, RngStream& rng);

/// Scaled-identity precoders meeting both power budgets and the MMSE
/// receiver, no THP (U = I, identity order).
BranchDesign naf_design(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd);

struct BlockOutcome {
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  double squared_error = 0.0;  // sum over the block of ||v_hat - v||^2
  std::uint64_t vectors = 0;
  bool converged = true;
  std::size_t l_opt = 0;
  std::size_t l_used = 0;
};

/// One block of `config.k` symbol vectors for trial `trial`. Channel, data,
/// noise and side-information draws depend only on (seed, trial).
BlockOutcome run_block(const SimConfig& config, const BranchCodebook& codebook,
                       double snr_rd_db, std::uint64_t trial);

struct PointResult {
  double snr_rd_db = 0.0;
  double ber = 0.0;
  double mse = 0.0;
  std::uint64_t bit_count = 0;
  std::uint64_t error_count = 0;
  std::uint64_t block_count = 0;
  std::uint64_t converged_blocks = 0;
  double converged_fraction = 0.0;
  std::vector<std::uint64_t> block_errors;      // per trial, for paired statistics
  std::vector<std::uint64_t> branch_histogram;  // selected l_opt counts
};

struct SimResult {
  SimConfig config;
  std::string label;  // codebook name for mbthp, baseline name otherwise
  std::size_t branches = 1;
  std::vector<PointResult> points;
};

std::string scheme_label(const SimConfig& config);

SimResult sweep(const SimConfig& config, const BranchCodebook& codebook);
SimResult sweep(const SimConfig& config);

/// Monte-Carlo counterpart of evaluate_mse: draws channel errors around the
/// given estimates, Gaussian x_bar with variance sigma_s2 and noise, and
/// averages ||W T y_d - U x_bar||^2 over `samples` draws.
double empirical_mse(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                     const BranchDesign& design, std::uint64_t samples, std::uint64_t seed);

/// Mean and standard error of the per-block difference a - b in error
/// counts, scaled to BER by bits per block.
struct PairedDifference {
  double mean = 0.0;
  double standard_error = 0.0;
};
PairedDifference paired_ber_difference(const PointResult& a, const PointResult& b);

}  // namespace mbthp
