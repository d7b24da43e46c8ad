#pragma once

#include <cstddef>
#include <vector>

#include "mbthp/linalg.hpp"

namespace mbthp {

/// One SIC cancellation order. `perm[i]` is the original stream placed at
/// position i, i.e. t = permutation_matrix(perm) and reordered = t * s.
struct OrderingPattern {
  std::size_t index = 0;
  std::vector<std::size_t> perm;
  CMatrix t;
};

OrderingPattern make_pattern(std::size_t index, std::vector<std::size_t> perm);
OrderingPattern identity_pattern(std::size_t n);

/// t * s
CVector apply_order(const OrderingPattern& p, const CVector& s);
/// t^T * v
CVector undo_order(const OrderingPattern& p, const CVector& v);

}  // namespace mbthp
