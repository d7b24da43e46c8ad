#include "mbthp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mbthp/errors.hpp"

namespace mbthp {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::size_t line, const std::string& key, const std::string& val) {
  throw ContractViolation("line " + std::to_string(line) + ": bad value '" + val + "' for " + key);
}

double to_double(std::size_t line, const std::string& key, const std::string& val) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(val, &pos);
    if (pos != val.size() || !std::isfinite(v)) bad_value(line, key, val);
    return v;
  } catch (const std::logic_error&) {
    bad_value(line, key, val);
  }
}

std::uint64_t to_uint(std::size_t line, const std::string& key, const std::string& val) {
  if (val.empty() || val.find_first_not_of("0123456789") != std::string::npos) {
    bad_value(line, key, val);
  }
  try {
    return std::stoull(val);
  } catch (const std::logic_error&) {
    bad_value(line, key, val);
  }
}

std::vector<double> to_list(std::size_t line, const std::string& key, std::string val) {
  for (char& c : val) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(val);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(line, key, tok));
  if (out.empty()) bad_value(line, key, val);
  return out;
}

}  // namespace

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::kMbthp: return "mbthp";
    case Baseline::kThpSingle: return "thp_single";
    case Baseline::kThpNonrobust: return "thp_nonrobust";
    case Baseline::kNaf: return "naf";
  }
  return "mbthp";
}

Baseline parse_baseline(std::string_view name) {
  if (name == "mbthp") return Baseline::kMbthp;
  if (name == "thp_single") return Baseline::kThpSingle;
  if (name == "thp_nonrobust") return Baseline::kThpNonrobust;
  if (name == "naf") return Baseline::kNaf;
  throw ContractViolation("unknown baseline: " + std::string(name));
}

std::string_view to_string(CovarianceCase c) { return c == CovarianceCase::kA ? "A" : "B"; }

CovarianceCase parse_case(std::string_view name) {
  if (name == "A" || name == "a") return CovarianceCase::kA;
  if (name == "B" || name == "b") return CovarianceCase::kB;
  throw ContractViolation("case must be A or B, got " + std::string(name));
}

void validate(const SimConfig& c) {
  if (c.dims.n_s == 0 || c.dims.n_r == 0 || c.dims.n_d == 0) {
    throw ContractViolation("antenna counts must be positive");
  }
  if (c.dims.n_s < c.dims.n_d) throw ContractViolation("n_s must be >= n_d");
  if (c.dims.n_r < c.dims.n_d) throw ContractViolation("n_r must be >= n_d");
  if (c.k < 1) throw ContractViolation("k must be >= 1");
  if (c.blocks < 1) throw ContractViolation("blocks must be >= 1");
  if (c.l < 1) throw ContractViolation("L must be >= 1");
  if (c.scheme == CodebookScheme::kSingle && c.l != 1) {
    throw ContractViolation("single scheme has exactly one branch");
  }
  if (c.scheme == CodebookScheme::kExhaustive || c.scheme == CodebookScheme::kPsp ||
      c.scheme == CodebookScheme::kFsb) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= c.dims.n_d; ++i) f *= i;
    if (c.dims.n_d > 8) throw ContractViolation("multi-branch codebooks support n_d <= 8");
    if (c.l > f) throw ContractViolation("L must not exceed n_d!");
    if (c.scheme == CodebookScheme::kExhaustive && c.l != f) {
      throw ContractViolation("exhaustive scheme uses L = n_d!");
    }
  }
  unsigned side = 1;
  while (side * side < c.m) ++side;
  if (c.m < 4 || side * side != c.m || (c.m & (c.m - 1)) != 0) {
    throw ContractViolation("m must be a square power of two >= 4");
  }
  if (c.snr_rd_db.empty()) throw ContractViolation("snr_rd_db needs at least one point");
  if (!(c.sigma_e2 >= 0.0 && c.sigma_e2 < 1.0)) {
    throw ContractViolation("sigma_e2 must lie in [0, 1)");
  }
  if (!(c.alpha >= 0.0 && c.alpha < 1.0)) throw ContractViolation("alpha must lie in [0, 1)");
  if (!(c.beta >= 0.0 && c.beta < 1.0)) throw ContractViolation("beta must lie in [0, 1)");
  if (!(c.si_error_rate >= 0.0 && c.si_error_rate <= 1.0)) {
    throw ContractViolation("si_error_rate must lie in [0, 1]");
  }
  if (c.fsb_experiments < 1) throw ContractViolation("fsb_experiments must be >= 1");
  if (c.sigma_e2 > 0.0 && c.covariance == CovarianceCase::kA && c.alpha != 0.0) {
    throw UnsupportedConfiguration("case A requires alpha = 0");
  }
  if (c.sigma_e2 > 0.0 && c.covariance == CovarianceCase::kB && c.beta != 0.0) {
    throw UnsupportedConfiguration("case B requires beta = 0");
  }
}

SimConfig parse_config(std::string_view text, const SimConfig& base) {
  SimConfig c = base;
  std::istringstream is{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ContractViolation("line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string val = trim(std::string_view(body).substr(eq + 1));
    if (key == "n_s") {
      c.dims.n_s = to_uint(line, key, val);
    } else if (key == "n_r") {
      c.dims.n_r = to_uint(line, key, val);
    } else if (key == "n_d") {
      c.dims.n_d = to_uint(line, key, val);
    } else if (key == "m") {
      c.m = static_cast<unsigned>(to_uint(line, key, val));
    } else if (key == "k") {
      c.k = to_uint(line, key, val);
    } else if (key == "scheme") {
      c.scheme = parse_scheme(val);
    } else if (key == "l" || key == "L") {
      c.l = to_uint(line, key, val);
    } else if (key == "case") {
      c.covariance = parse_case(val);
    } else if (key == "snr_sr_db") {
      c.snr_sr_db = to_double(line, key, val);
    } else if (key == "snr_rd_db") {
      c.snr_rd_db = to_list(line, key, val);
    } else if (key == "sigma_e2") {
      c.sigma_e2 = to_double(line, key, val);
    } else if (key == "alpha") {
      c.alpha = to_double(line, key, val);
    } else if (key == "beta") {
      c.beta = to_double(line, key, val);
    } else if (key == "blocks") {
      c.blocks = to_uint(line, key, val);
    } else if (key == "seed") {
      c.seed = to_uint(line, key, val);
    } else if (key == "si_error_rate") {
      c.si_error_rate = to_double(line, key, val);
    } else if (key == "baseline") {
      c.baseline = parse_baseline(val);
    } else if (key == "fsb_experiments") {
      c.fsb_experiments = to_uint(line, key, val);
    } else if (key == "fsb_codebook") {
      c.fsb_codebook = val;
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(to_uint(line, key, val));
    } else {
      throw ContractViolation("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

SimConfig load_config(const std::string& path, const SimConfig& base) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), base);
}

std::string format_config(const SimConfig& c) {
  std::ostringstream os;
  os.precision(10);
  os << "n_s = " << c.dims.n_s << '\n'
     << "n_r = " << c.dims.n_r << '\n'
     << "n_d = " << c.dims.n_d << '\n'
     << "m = " << c.m << '\n'
     << "k = " << c.k << '\n'
     << "scheme = " << to_string(c.scheme) << '\n'
     << "l = " << c.l << '\n'
     << "case = " << to_string(c.covariance) << '\n'
     << "snr_sr_db = " << c.snr_sr_db << '\n'
     << "snr_rd_db = ";
  for (std::size_t i = 0; i < c.snr_rd_db.size(); ++i) os << (i ? ", " : "") << c.snr_rd_db[i];
  os << '\n'
     << "sigma_e2 = " << c.sigma_e2 << '\n'
     << "alpha = " << c.alpha << '\n'
     << "beta = " << c.beta << '\n'
     << "blocks = " << c.blocks << '\n'
     << "seed = " << c.seed << '\n'
     << "si_error_rate = " << c.si_error_rate << '\n'
     << "baseline = " << to_string(c.baseline) << '\n'
     << "fsb_experiments = " << c.fsb_experiments << '\n';
  if (!c.fsb_codebook.empty()) os << "fsb_codebook = " << c.fsb_codebook << '\n';
  os << "threads = " << c.threads << '\n';
  return os.str();
}

}  // namespace mbthp
