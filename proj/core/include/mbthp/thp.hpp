#pragma once

// Square-QAM mapping, the THP modulo operator, successive precoding at the
// source and modulo/quantize detection at the destination.

#include <cstdint>
#include <span>
#include <vector>

#include "mbthp/linalg.hpp"
#include "mbthp/ordering.hpp"

namespace mbthp {

/// Square m-QAM on the odd-integer grid {+-1, +-3, ..., +-(sqrt(m)-1)} per
/// component, Gray-coded per axis. Not normalized: average energy is
/// 2(m-1)/3.
class QamConstellation {
 public:
  explicit QamConstellation(unsigned m);

  unsigned order() const { return m_; }
  int side() const { return side_; }
  unsigned bits_per_symbol() const { return bits_per_symbol_; }
  double sigma_s2() const { return 2.0 * (m_ - 1.0) / 3.0; }
  /// Half-width of the modulo region, sqrt(m).
  double modulo_half_width() const { return static_cast<double>(side_); }

  /// Nearest grid level for one real component, clamped to the outermost
  /// level.
  double quantize_component(double x) const;
  Complex quantize(const Complex& z) const;

  std::vector<Complex> map(std::span<const std::uint8_t> bits) const;
  std::vector<std::uint8_t> demap(std::span<const Complex> symbols) const;

 private:
  unsigned m_;
  int side_;
  unsigned bits_per_symbol_;
};

/// Per-component x - 2 sqrt(m) floor((x + sqrt(m)) / (2 sqrt(m))); result in
/// [-sqrt(m), sqrt(m)).
Complex mod_m(const Complex& x, unsigned m);
CVector mod_m(const CVector& x, unsigned m);

struct ThpEncoding {
  CVector xbar;  // channel symbols
  CVector e;     // modulo offsets, multiples of 2 sqrt(m) per component
  CVector v;     // reordered data plus offsets, v = U xbar
};

/// Successive THP encoding: xbar_k = MOD(sbar_k - sum_{n<k} U(k,n) xbar_n)
/// with sbar = T s. Throws ContractViolation unless u is lower triangular
/// with unit diagonal.
ThpEncoding thp_encode(const CVector& s, const OrderingPattern& order, const CMatrix& u,
                       unsigned m);

/// s_hat = Q(MOD(T^T v_hat)).
CVector receiver_detect(const CVector& v_hat, const OrderingPattern& order,
                        const QamConstellation& qam);

/// Plain nearest-point slicing, no modulo (linear baselines).
CVector slice(const CVector& z, const QamConstellation& qam);

}  // namespace mbthp
