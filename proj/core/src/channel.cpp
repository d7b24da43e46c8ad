#include "mbthp/channel.hpp"

#include <cmath>

#include "mbthp/errors.hpp"

namespace mbthp {
namespace {

void check_unit_interval(double rho, const char* name) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw ContractViolation(std::string(name) + " must lie in [0, 1)");
  }
}

struct HopFactors {
  CMatrix rx_corr_sqrt;
  CMatrix err_sqrt;
  CMatrix psi_sqrt;
};

CMatrix sample_hop(const HopFactors& f, double sigma_e2, RngStream& rng, CMatrix& error) {
  const CMatrix estimate = std::sqrt(1.0 - sigma_e2) * kronecker_draw(f.rx_corr_sqrt, f.psi_sqrt, rng);
  error = kronecker_draw(f.err_sqrt, f.psi_sqrt, rng);
  return estimate;
}

}  // namespace

CMatrix exponential_correlation(std::size_t n, double rho) {
  check_unit_interval(rho, "correlation coefficient");
  if (n == 0) throw ContractViolation("correlation matrix size must be positive");
  const auto dim = static_cast<Eigen::Index>(n);
  CMatrix r(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      r(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  return r;
}

ChannelStatistics build_statistics(const AntennaConfig& dims, double alpha, double beta,
                                   double sigma_e2) {
  if (!(sigma_e2 >= 0.0)) throw ContractViolation("sigma_e2 must be non-negative");
  ChannelStatistics s;
  s.dims = dims;
  s.alpha = alpha;
  s.beta = beta;
  s.sigma_e2 = sigma_e2;
  s.psi_sr = exponential_correlation(dims.n_s, alpha);
  s.psi_rd = exponential_correlation(dims.n_r, alpha);
  s.rx_corr_sr = exponential_correlation(dims.n_r, beta);
  s.rx_corr_rd = exponential_correlation(dims.n_d, beta);
  s.sigma_sr = sigma_e2 * s.rx_corr_sr;
  s.sigma_rd = sigma_e2 * s.rx_corr_rd;
  return s;
}

CMatrix kronecker_draw(const CMatrix& sigma_sqrt, const CMatrix& psi_sqrt, RngStream& rng) {
  const CMatrix g = rng.complex_gaussian(sigma_sqrt.rows(), psi_sqrt.rows());
  return sigma_sqrt * g * psi_sqrt.transpose();
}

ChannelRealization sample_realization(const ChannelStatistics& stats, std::uint64_t seed,
                                      std::uint64_t trial) {
  if (!(stats.sigma_e2 >= 0.0 && stats.sigma_e2 < 1.0)) {
    throw ContractViolation("sigma_e2 must lie in [0, 1) for channel sampling");
  }
  const HopFactors sr{sqrt_psd(stats.rx_corr_sr), sqrt_psd(stats.sigma_sr), sqrt_psd(stats.psi_sr)};
  const HopFactors rd{sqrt_psd(stats.rx_corr_rd), sqrt_psd(stats.sigma_rd), sqrt_psd(stats.psi_rd)};

  RngStream sr_rng({seed, trial, StreamId::kSourceRelay});
  RngStream rd_rng({seed, trial, StreamId::kRelayDestination});

  ChannelRealization out;
  out.hbar_sr = sample_hop(sr, stats.sigma_e2, sr_rng, out.dh_sr);
  out.hbar_rd = sample_hop(rd, stats.sigma_e2, rd_rng, out.dh_rd);
  out.h_sr = out.hbar_sr + out.dh_sr;
  out.h_rd = out.hbar_rd + out.dh_rd;
  return out;
}

}  // namespace mbthp
