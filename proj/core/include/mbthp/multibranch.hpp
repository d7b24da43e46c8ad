#pragma once

// Ordering-pattern codebooks, per-block branch selection and the cost of
// signalling the chosen branch.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mbthp/design.hpp"
#include "mbthp/ordering.hpp"

namespace mbthp {

enum class CodebookScheme { kExhaustive, kPsp, kFsb, kSingle };

std::string_view to_string(CodebookScheme s);
/// Accepts "exhaustive", "psp", "fsb", "single". Throws ContractViolation.
CodebookScheme parse_scheme(std::string_view name);

struct BranchCodebook {
  CodebookScheme scheme = CodebookScheme::kSingle;
  std::vector<OrderingPattern> patterns;

  std::size_t size() const { return patterns.size(); }
};

/// n! patterns in lexicographic order; the first is the identity.
BranchCodebook exhaustive_codebook(std::size_t n);
BranchCodebook single_codebook(std::size_t n);

/// Identity first, then for l = 2..L the shifted reversal: identity on the
/// first s = floor((l-2) n / L) positions and the remaining n - s reversed.
/// A pattern that repeats an earlier one is replaced by the next unused
/// permutation in lexicographic order (wrapping around). Throws
/// ContractViolation unless 1 <= l <= n!.
BranchCodebook psp_codebook(std::size_t n, std::size_t l);

/// Build a codebook from explicit permutations, checking validity and
/// pairwise distinctness.
BranchCodebook codebook_from_perms(CodebookScheme scheme,
                                   const std::vector<std::vector<std::size_t>>& perms);

struct SelectionOutcome {
  std::size_t l_opt = 0;          // position in the codebook
  std::vector<double> distances;  // accumulated squared distance per branch
  unsigned feedforward_bits = 0;
};

/// Noise-free selection: each branch THP-encodes the block with its own U and
/// ordering, passes it through the estimated cascade, equalizes with its W,
/// applies the modulo and restores the original stream order. The branch with
/// the smallest accumulated ||s - s_tilde||^2 wins, lowest index on ties.
SelectionOutcome select_branch(const std::vector<BranchDesign>& designs,
                               const std::vector<CVector>& block, const CMatrix& hbar_sr,
                               const CMatrix& hbar_rd, unsigned m);

/// Accumulated distance of a single branch; building block of select_branch.
double branch_distance(const BranchDesign& design, const std::vector<CVector>& block,
                       const CMatrix& hbar_sr, const CMatrix& hbar_rd, unsigned m);

/// ceil(log2 l); 0 for a single branch.
unsigned feedforward_bits(std::size_t l);

struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

/// Payload bits over payload plus index bits, as an unreduced fraction.
Ratio feedforward_efficiency_ratio(std::uint64_t n_d, std::uint64_t k, std::uint64_t m,
                                   std::uint64_t b);
double feedforward_efficiency(std::uint64_t n_d, std::uint64_t k, std::uint64_t m,
                              std::uint64_t b);

/// Index bits, most significant first.
std::vector<std::uint8_t> encode_index(std::size_t index, unsigned bits);
std::size_t decode_index(const std::vector<std::uint8_t>& bits);

/// Returns the position (into exhaustive_codebook(n)) of the branch that wins
/// experiment `experiment`.
using FsbEvaluator = std::function<std::size_t(std::uint64_t experiment)>;

struct FsbTraining {
  BranchCodebook codebook;
  std::vector<std::uint64_t> histogram;  // wins per exhaustive index
  std::uint64_t experiments = 0;
};

/// Runs `n_e` experiments (in parallel, results stored by experiment index)
/// and keeps the l most frequent winners, ties broken by exhaustive index.
FsbTraining fsb_train(std::size_t n, std::size_t l, std::uint64_t n_e,
                      const FsbEvaluator& evaluator, unsigned threads = 1);

struct FsbFile {
  std::size_t n_s = 0;
  std::size_t l = 0;
  std::uint64_t n_e = 0;
  std::uint64_t seed = 0;
  BranchCodebook codebook;
};

/// Header `fsb n_s=<n> L=<l> n_e=<n_e> seed=<s>` then one permutation per line.
void write_fsb_file(const std::string& path, const FsbFile& file);
FsbFile read_fsb_file(const std::string& path);

}  // namespace mbthp
