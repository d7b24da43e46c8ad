#include "mbthp/ordering.hpp"

namespace mbthp {

OrderingPattern make_pattern(std::size_t index, std::vector<std::size_t> perm) {
  OrderingPattern p;
  p.index = index;
  p.t = permutation_matrix(perm);
  p.perm = std::move(perm);
  return p;
}

OrderingPattern identity_pattern(std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  return make_pattern(0, std::move(perm));
}

CVector apply_order(const OrderingPattern& p, const CVector& s) {
  CVector out(s.size());
  for (std::size_t i = 0; i < p.perm.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = s(static_cast<Eigen::Index>(p.perm[i]));
  }
  return out;
}

CVector undo_order(const OrderingPattern& p, const CVector& v) {
  CVector out(v.size());
  for (std::size_t i = 0; i < p.perm.size(); ++i) {
    out(static_cast<Eigen::Index>(p.perm[i])) = v(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace mbthp
