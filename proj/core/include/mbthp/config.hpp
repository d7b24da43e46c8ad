#pragma once

// Simulation configuration and its flat `key = value` file format.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mbthp/channel.hpp"
#include "mbthp/design.hpp"
#include "mbthp/multibranch.hpp"

namespace mbthp {

enum class Baseline { kMbthp, kThpSingle, kThpNonrobust, kNaf };

std::string_view to_string(Baseline b);
Baseline parse_baseline(std::string_view name);

std::string_view to_string(CovarianceCase c);  // "A" or "B"
CovarianceCase parse_case(std::string_view name);

struct SimConfig {
  AntennaConfig dims;
  unsigned m = 16;
  std::size_t k = 100;
  CodebookScheme scheme = CodebookScheme::kPsp;
  std::size_t l = 4;
  CovarianceCase covariance = CovarianceCase::kA;
  double snr_sr_db = 30.0;
  std::vector<double> snr_rd_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  double sigma_e2 = 0.001;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t blocks = 2000;
  std::uint64_t seed = 1;
  double si_error_rate = 0.0;
  Baseline baseline = Baseline::kMbthp;
  std::uint64_t fsb_experiments = 10000;
  std::string fsb_codebook;  // optional file; trained on the fly when empty
  unsigned threads = 0;      // 0 = hardware concurrency
};

/// Throws ContractViolation describing the first violated constraint.
void validate(const SimConfig& config);

/// Applies `key = value` lines on top of `base`. `#` starts a comment.
/// snr_rd_db takes a comma- or space-separated list. Unknown keys and
/// malformed values raise ContractViolation with the line number.
SimConfig parse_config(std::string_view text, const SimConfig& base = {});

/// Reads and parses a file; IoError if it cannot be opened.
SimConfig load_config(const std::string& path, const SimConfig& base = {});

std::string format_config(const SimConfig& config);

}  // namespace mbthp
