#pragma once

// Kronecker-correlated channel statistics and the estimated/error/true
// channel triple sampled from them.

#include <cstddef>
#include <cstdint>

#include "mbthp/linalg.hpp"
#include "mbthp/rng.hpp"

namespace mbthp {

struct AntennaConfig {
  std::size_t n_s = 4;  // source
  std::size_t n_r = 4;  // relay
  std::size_t n_d = 4;  // destination (and number of streams)
};

struct ChannelStatistics {
  AntennaConfig dims;
  CMatrix psi_sr;    // n_s x n_s, transmit-side error covariance
  CMatrix sigma_sr;  // n_r x n_r, receive-side error covariance
  CMatrix psi_rd;    // n_r x n_r
  CMatrix sigma_rd;  // n_d x n_d
  // Receive correlation without the sigma_e2 factor; shapes the estimated
  // channel even when sigma_e2 == 0.
  CMatrix rx_corr_sr;
  CMatrix rx_corr_rd;
  double sigma_e2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct ChannelRealization {
  CMatrix hbar_sr, hbar_rd;  // estimates known to the transceiver design
  CMatrix dh_sr, dh_rd;      // estimation errors
  CMatrix h_sr, h_rd;        // true channels, h = hbar + dh
};

/// Entry (i, j) = rho^|i-j|. Requires 0 <= rho < 1.
CMatrix exponential_correlation(std::size_t n, double rho);

ChannelStatistics build_statistics(const AntennaConfig& dims, double alpha, double beta,
                                   double sigma_e2);

/// Draws one realization. The estimate has per-entry variance 1 - sigma_e2
/// shaped by the Kronecker correlations, the error is
/// Sigma^{1/2} G Psi^{T/2}, so the true channel has unit variance per entry.
/// Each hop uses its own substream of (seed, trial).
ChannelRealization sample_realization(const ChannelStatistics& stats, std::uint64_t seed,
                                      std::uint64_t trial);

/// Kronecker draw Sigma^{1/2} G Psi^{T/2} with G i.i.d. unit complex Gaussian.
CMatrix kronecker_draw(const CMatrix& sigma_sqrt, const CMatrix& psi_sqrt, RngStream& rng);

}  // namespace mbthp
