#include "mbthp/multibranch.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mbthp/errors.hpp"
#include "mbthp/parallel.hpp"
#include "mbthp/thp.hpp"

namespace mbthp {
namespace {

std::size_t factorial_capped(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (f > static_cast<std::size_t>(-1) / i) return static_cast<std::size_t>(-1);
    f *= i;
  }
  return f;
}

std::vector<std::size_t> iota_perm(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

void check_perm(const std::vector<std::size_t>& perm, std::size_t n) {
  if (perm.size() != n) throw ContractViolation("permutation has wrong length");
  std::vector<bool> seen(n, false);
  for (std::size_t v : perm) {
    if (v >= n || seen[v]) throw ContractViolation("not a permutation");
    seen[v] = true;
  }
}

}  // namespace

std::string_view to_string(CodebookScheme s) {
  switch (s) {
    case CodebookScheme::kExhaustive: return "exhaustive";
    case CodebookScheme::kPsp: return "psp";
    case CodebookScheme::kFsb: return "fsb";
    case CodebookScheme::kSingle: return "single";
  }
  return "single";
}

CodebookScheme parse_scheme(std::string_view name) {
  if (name == "exhaustive") return CodebookScheme::kExhaustive;
  if (name == "psp") return CodebookScheme::kPsp;
  if (name == "fsb") return CodebookScheme::kFsb;
  if (name == "single") return CodebookScheme::kSingle;
  throw ContractViolation("unknown codebook scheme: " + std::string(name));
}

BranchCodebook codebook_from_perms(CodebookScheme scheme,
                                   const std::vector<std::vector<std::size_t>>& perms) {
  if (perms.empty()) throw ContractViolation("codebook needs at least one pattern");
  const std::size_t n = perms.front().size();
  BranchCodebook cb;
  cb.scheme = scheme;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    check_perm(perms[i], n);
    for (std::size_t j = 0; j < i; ++j) {
      if (perms[j] == perms[i]) throw ContractViolation("codebook patterns must be distinct");
    }
    cb.patterns.push_back(make_pattern(i, perms[i]));
  }
  return cb;
}

BranchCodebook exhaustive_codebook(std::size_t n) {
  if (n == 0 || n > 8) throw ContractViolation("exhaustive codebook supports 1 <= n <= 8");
  std::vector<std::vector<std::size_t>> perms;
  auto p = iota_perm(n);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return codebook_from_perms(CodebookScheme::kExhaustive, perms);
}

BranchCodebook single_codebook(std::size_t n) {
  if (n == 0) throw ContractViolation("stream count must be positive");
  return codebook_from_perms(CodebookScheme::kSingle, {iota_perm(n)});
}

BranchCodebook psp_codebook(std::size_t n, std::size_t l) {
  if (n == 0) throw ContractViolation("stream count must be positive");
  if (l < 1 || l > factorial_capped(n)) {
    throw ContractViolation("PSP needs 1 <= L <= n!");
  }
  std::vector<std::vector<std::size_t>> perms{iota_perm(n)};
  for (std::size_t idx = 2; idx <= l; ++idx) {
    const std::size_t s = (idx - 2) * n / l;
    auto p = iota_perm(n);
    std::reverse(p.begin() + static_cast<std::ptrdiff_t>(s), p.end());
    while (std::find(perms.begin(), perms.end(), p) != perms.end()) {
      // wraps to the identity after the last permutation; that one is taken
      std::next_permutation(p.begin(), p.end());
    }
    perms.push_back(p);
  }
  return codebook_from_perms(CodebookScheme::kPsp, perms);
}

double branch_distance(const BranchDesign& design, const std::vector<CVector>& block,
                       const CMatrix& hbar_sr, const CMatrix& hbar_rd, unsigned m) {
  const CMatrix g =
      design.w * design.order.t * hbar_rd * design.f_r * hbar_sr * design.f_s;
  double total = 0.0;
  for (const CVector& s : block) {
    const ThpEncoding enc = thp_encode(s, design.order, design.u, m);
    const CVector est = undo_order(design.order, mod_m(CVector(g * enc.xbar), m));
    total += (s - est).squaredNorm();
  }
  return total;
}

SelectionOutcome select_branch(const std::vector<BranchDesign>& designs,
                               const std::vector<CVector>& block, const CMatrix& hbar_sr,
                               const CMatrix& hbar_rd, unsigned m) {
  if (designs.empty()) throw ContractViolation("select_branch needs at least one design");
  SelectionOutcome out;
  out.feedforward_bits = feedforward_bits(designs.size());
  out.distances.resize(designs.size());
  for (std::size_t l = 0; l < designs.size(); ++l) {
    out.distances[l] = branch_distance(designs[l], block, hbar_sr, hbar_rd, m);
  }
  out.l_opt = 0;
  for (std::size_t l = 1; l < designs.size(); ++l) {
    if (out.distances[l] < out.distances[out.l_opt]) out.l_opt = l;
  }
  return out;
}

unsigned feedforward_bits(std::size_t l) {
  if (l == 0) throw ContractViolation("branch count must be positive");
  unsigned b = 0;
  while ((std::size_t{1} << b) < l) ++b;
  return b;
}

Ratio feedforward_efficiency_ratio(std::uint64_t n_d, std::uint64_t k, std::uint64_t m,
                                   std::uint64_t b) {
  if (n_d == 0 || k == 0 || m < 2) throw ContractViolation("counts must be positive");
  std::uint64_t bits_per_symbol = 0;
  while ((std::uint64_t{1} << (bits_per_symbol + 1)) <= m) ++bits_per_symbol;
  if ((std::uint64_t{1} << bits_per_symbol) != m) {
    throw ContractViolation("constellation order must be a power of two");
  }
  const std::uint64_t payload = n_d * k * bits_per_symbol;
  return {payload, payload + b};
}

double feedforward_efficiency(std::uint64_t n_d, std::uint64_t k, std::uint64_t m,
                              std::uint64_t b) {
  const Ratio r = feedforward_efficiency_ratio(n_d, k, m, b);
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

std::vector<std::uint8_t> encode_index(std::size_t index, unsigned bits) {
  if (bits < 64 && index >> bits) throw ContractViolation("index does not fit in bit count");
  std::vector<std::uint8_t> out(bits);
  for (unsigned i = 0; i < bits; ++i) out[i] = (index >> (bits - 1 - i)) & 1u;
  return out;
}

std::size_t decode_index(const std::vector<std::uint8_t>& bits) {
  std::size_t v = 0;
  for (std::uint8_t b : bits) v = (v << 1) | (b & 1u);
  return v;
}

FsbTraining fsb_train(std::size_t n, std::size_t l, std::uint64_t n_e,
                      const FsbEvaluator& evaluator, unsigned threads) {
  if (n_e < 1) throw ContractViolation("FSB training needs at least one experiment");
  const BranchCodebook all = exhaustive_codebook(n);
  if (l < 1 || l > all.size()) throw ContractViolation("FSB needs 1 <= L <= n!");

  std::vector<std::size_t> winners(n_e);
  parallel_for(n_e, threads, [&](std::size_t e) { winners[e] = evaluator(e); });

  FsbTraining out;
  out.experiments = n_e;
  out.histogram.assign(all.size(), 0);
  for (std::size_t w : winners) {
    if (w >= all.size()) throw ContractViolation("FSB evaluator returned an invalid index");
    ++out.histogram[w];
  }
  std::vector<std::size_t> rank(all.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    return out.histogram[a] > out.histogram[b];
  });
  std::vector<std::vector<std::size_t>> perms;
  for (std::size_t i = 0; i < l; ++i) perms.push_back(all.patterns[rank[i]].perm);
  out.codebook = codebook_from_perms(CodebookScheme::kFsb, perms);
  return out;
}

void write_fsb_file(const std::string& path, const FsbFile& file) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "fsb n_s=" << file.n_s << " L=" << file.l << " n_e=" << file.n_e
     << " seed=" << file.seed << '\n';
  for (const auto& p : file.codebook.patterns) {
    for (std::size_t i = 0; i < p.perm.size(); ++i) os << (i ? " " : "") << p.perm[i];
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

FsbFile read_fsb_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::string header;
  if (!std::getline(is, header)) throw IoError("empty FSB file: " + path);
  FsbFile f;
  {
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "fsb") throw IoError("missing fsb header: " + path);
    std::string field;
    int seen = 0;
    while (hs >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw IoError("malformed header field in " + path);
      const std::string key = field.substr(0, eq);
      const std::string val = field.substr(eq + 1);
      try {
        if (key == "n_s") {
          f.n_s = std::stoull(val);
        } else if (key == "L") {
          f.l = std::stoull(val);
        } else if (key == "n_e") {
          f.n_e = std::stoull(val);
        } else if (key == "seed") {
          f.seed = std::stoull(val);
        } else {
          throw IoError("unknown header field '" + key + "' in " + path);
        }
      } catch (const std::logic_error&) {
        throw IoError("bad header value '" + field + "' in " + path);
      }
      ++seen;
    }
    if (seen != 4) throw IoError("incomplete fsb header: " + path);
  }
  std::vector<std::vector<std::size_t>> perms;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<std::size_t> p;
    long long v = 0;
    while (ls >> v) {
      if (v < 0) throw IoError("negative index in " + path);
      p.push_back(static_cast<std::size_t>(v));
    }
    if (!ls.eof()) throw IoError("non-numeric entry in " + path);
    perms.push_back(std::move(p));
  }
  if (perms.size() != f.l) throw IoError("pattern count does not match header in " + path);
  for (const auto& p : perms) {
    if (p.size() != f.n_s) throw IoError("pattern length does not match header in " + path);
  }
  try {
    f.codebook = codebook_from_perms(CodebookScheme::kFsb, perms);
  } catch (const ContractViolation& e) {
    throw IoError(std::string(e.what()) + " in " + path);
  }
  return f;
}

}  // namespace mbthp
