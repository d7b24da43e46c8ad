#include "mbthp/complexity.hpp"

#include <iomanip>
#include <sstream>

#include "mbthp/errors.hpp"

namespace mbthp {

ComplexityTable complexity_estimate(const ComplexityInputs& in) {
  if (in.n_s == 0 || in.n_r == 0 || in.n_d == 0 || in.i_s == 0 || in.i_r == 0 || in.i_i == 0 ||
      in.l == 0 || in.k == 0) {
    throw ContractViolation("complexity inputs must be positive");
  }
  const std::uint64_t ns = in.n_s, nr = in.n_r, nd = in.n_d;
  ComplexityTable t;
  t.rows = {
      {1, "whitened H_sr", "N_s^2 (N_s + N_r + N_d)", ns * ns * (ns + nr + nd)},
      {2, "whitened H_rd", "N_r^2 (N_s + N_r + N_d)", nr * nr * (ns + nr + nd)},
      {3, "SVD of whitened H_sr", "N_r N_s^2 + N_s^3", nr * ns * ns + ns * ns * ns},
      {4, "SVD of whitened H_rd", "N_d N_r^2 + N_r^3", nd * nr * nr + nr * nr * nr},
      {5, "inverse of B", "N_d^3", nd * nd * nd},
      {6, "powers x_i and y_i", "N_d I_s I_i + N_d I_r I_i",
       nd * in.i_s * in.i_i + nd * in.i_r * in.i_i},
      {7, "GMD", "N_d^3", nd * nd * nd},
      {8, "feedback matrix U", "N_d^3", nd * nd * nd},
      {9, "precoders F_s and F_r", "N_s N_d + N_s N_d^2 + N_r^2 + N_r^3",
       ns * nd + ns * nd * nd + nr * nr + nr * nr * nr},
  };
  for (const auto& r : t.rows) t.per_branch += r.units;
  t.selection = in.k * nd * nd;
  t.total = t.per_branch * in.l + t.selection;
  return t;
}

std::string format_complexity(const ComplexityTable& table) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "step" << std::setw(26) << "operation" << std::setw(38)
     << "formula"
     << "units\n";
  for (const auto& r : table.rows) {
    os << std::setw(6) << r.step << std::setw(26) << r.operation << std::setw(38) << r.formula
       << r.units << '\n';
  }
  os << "per branch: " << table.per_branch << '\n'
     << "selection:  " << table.selection << '\n'
     << "total:      " << table.total << '\n';
  return os.str();
}

}  // namespace mbthp
