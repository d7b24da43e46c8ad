#pragma once

// Leading-order FLOP counts of the per-branch design steps.

#include <cstdint>
#include <string>
#include <vector>

namespace mbthp {

struct ComplexityInputs {
  std::uint64_t n_s = 4;
  std::uint64_t n_r = 4;
  std::uint64_t n_d = 4;
  std::uint64_t i_s = 1;  // bisection steps for the source powers
  std::uint64_t i_r = 1;  // bisection steps for the relay powers
  std::uint64_t i_i = 1;  // outer water-filling sweeps
  std::uint64_t l = 1;    // branches
  std::uint64_t k = 1;    // block length (selection cost)
};

struct ComplexityRow {
  int step = 0;
  std::string operation;
  std::string formula;
  std::uint64_t units = 0;
};

struct ComplexityTable {
  std::vector<ComplexityRow> rows;  // nine per-branch steps
  std::uint64_t per_branch = 0;
  std::uint64_t selection = 0;      // K * n_d^2
  std::uint64_t total = 0;          // per_branch * L + selection
};

/// Throws ContractViolation when any count is zero.
ComplexityTable complexity_estimate(const ComplexityInputs& in);

std::string format_complexity(const ComplexityTable& table);

}  // namespace mbthp
