#pragma once

// CSV and plot-data output of sweep results.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mbthp/simulation.hpp"

namespace mbthp {

struct CsvRow {
  std::string scheme;
  std::string covariance;  // "A" or "B"
  std::uint64_t l = 1;
  std::uint64_t n_s = 0, n_r = 0, n_d = 0;
  std::uint64_t m = 0;
  std::uint64_t k = 0;
  double snr_sr_db = 0.0;
  double snr_rd_db = 0.0;
  double sigma_e2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t blocks = 0;
  double ber = 0.0;
  double mse = 0.0;
  double converged_fraction = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "scheme,case,L,n_s,n_r,n_d,m,K,snr_sr_db,snr_rd_db,sigma_e2,alpha,beta,blocks,ber,mse,"
    "converged_fraction";

std::vector<CsvRow> csv_rows(const SimResult& result);

/// Header plus one line per row; reals with 10 significant digits.
std::string format_csv(const std::vector<CsvRow>& rows);

/// Inverse of format_csv. Throws ContractViolation on a bad header or field.
std::vector<CsvRow> parse_csv(std::string_view text);

/// `snr_rd_db ber` lines preceded by a `#` comment.
std::string format_plot_data(const SimResult& result);

struct OutputPaths {
  std::string csv;
  std::string plot;
};

/// Writes <dir>/<label>_case<c>_L<l>.csv and the matching .dat, creating
/// `dir` if needed. IoError carries the failing path.
OutputPaths write_outputs(const SimResult& result, const std::string& dir);

}  // namespace mbthp
