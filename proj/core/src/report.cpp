#include "mbthp/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mbthp/errors.hpp"

namespace mbthp {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double field_double(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ContractViolation("csv line " + std::to_string(line) + ": bad number '" + s + "'");
}

std::uint64_t field_uint(const std::string& s, std::size_t line) {
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
    try {
      return std::stoull(s);
    } catch (const std::logic_error&) {
    }
  }
  throw ContractViolation("csv line " + std::to_string(line) + ": bad count '" + s + "'");
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << body;
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<CsvRow> csv_rows(const SimResult& result) {
  const SimConfig& c = result.config;
  std::vector<CsvRow> rows;
  for (const auto& p : result.points) {
    CsvRow r;
    r.scheme = result.label;
    r.covariance = std::string(to_string(c.covariance));
    r.l = result.branches;
    r.n_s = c.dims.n_s;
    r.n_r = c.dims.n_r;
    r.n_d = c.dims.n_d;
    r.m = c.m;
    r.k = c.k;
    r.snr_sr_db = c.snr_sr_db;
    r.snr_rd_db = p.snr_rd_db;
    r.sigma_e2 = c.sigma_e2;
    r.alpha = c.alpha;
    r.beta = c.beta;
    r.blocks = p.block_count;
    r.ber = p.ber;
    r.mse = p.mse;
    r.converged_fraction = p.converged_fraction;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.scheme << ',' << r.covariance << ',' << r.l << ',' << r.n_s << ',' << r.n_r << ','
       << r.n_d << ',' << r.m << ',' << r.k << ',' << fmt(r.snr_sr_db) << ','
       << fmt(r.snr_rd_db) << ',' << fmt(r.sigma_e2) << ',' << fmt(r.alpha) << ','
       << fmt(r.beta) << ',' << r.blocks << ',' << fmt(r.ber) << ',' << fmt(r.mse) << ','
       << fmt(r.converged_fraction) << '\n';
  }
  return os.str();
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line)) throw ContractViolation("empty csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ContractViolation("unexpected csv header");
  std::vector<CsvRow> rows;
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 17) {
      throw ContractViolation("csv line " + std::to_string(n) + ": expected 17 fields");
    }
    CsvRow r;
    r.scheme = f[0];
    r.covariance = f[1];
    r.l = field_uint(f[2], n);
    r.n_s = field_uint(f[3], n);
    r.n_r = field_uint(f[4], n);
    r.n_d = field_uint(f[5], n);
    r.m = field_uint(f[6], n);
    r.k = field_uint(f[7], n);
    r.snr_sr_db = field_double(f[8], n);
    r.snr_rd_db = field_double(f[9], n);
    r.sigma_e2 = field_double(f[10], n);
    r.alpha = field_double(f[11], n);
    r.beta = field_double(f[12], n);
    r.blocks = field_uint(f[13], n);
    r.ber = field_double(f[14], n);
    r.mse = field_double(f[15], n);
    r.converged_fraction = field_double(f[16], n);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_plot_data(const SimResult& result) {
  std::ostringstream os;
  os << "# snr_rd_db ber (" << result.label << ", case " << to_string(result.config.covariance)
     << ", L=" << result.branches << ")\n";
  for (const auto& p : result.points) os << fmt(p.snr_rd_db) << ' ' << fmt(p.ber) << '\n';
  return os.str();
}

OutputPaths write_outputs(const SimResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const std::string stem = result.label + "_case" +
                           std::string(to_string(result.config.covariance)) + "_L" +
                           std::to_string(result.branches);
  const fs::path csv = fs::path(dir) / (stem + ".csv");
  const fs::path dat = fs::path(dir) / (stem + ".dat");
  write_file(csv, format_csv(csv_rows(result)));
  write_file(dat, format_plot_data(result));
  return {csv.string(), dat.string()};
}

}  // namespace mbthp
