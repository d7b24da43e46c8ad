#include "mbthp/thp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mbthp/errors.hpp"

namespace mbthp {
namespace {

double mod_component(double x, double half_width) {
  const double period = 2.0 * half_width;
  return x - period * std::floor((x + half_width) / period);
}

double offset_component(double x, double half_width) {
  const double period = 2.0 * half_width;
  return -period * std::floor((x + half_width) / period);
}

unsigned gray_encode(unsigned k) { return k ^ (k >> 1); }

unsigned gray_decode(unsigned g) {
  unsigned k = g;
  for (unsigned shift = 1; shift < 32; shift <<= 1) k ^= k >> shift;
  return k;
}

}  // namespace

QamConstellation::QamConstellation(unsigned m) : m_(m) {
  const unsigned bits = m > 1 ? static_cast<unsigned>(std::countr_zero(m)) : 0;
  if (m < 4 || !std::has_single_bit(m) || bits % 2 != 0) {
    throw ContractViolation("QAM order must be an even power of two (4, 16, 64, ...)");
  }
  bits_per_symbol_ = bits;
  side_ = 1 << (bits / 2);
}

double QamConstellation::quantize_component(double x) const {
  const double level = 2.0 * std::floor(x / 2.0) + 1.0;
  const double edge = side_ - 1.0;
  return std::clamp(level, -edge, edge);
}

Complex QamConstellation::quantize(const Complex& z) const {
  return {quantize_component(z.real()), quantize_component(z.imag())};
}

std::vector<Complex> QamConstellation::map(std::span<const std::uint8_t> bits) const {
  if (bits.size() % bits_per_symbol_ != 0) {
    throw ContractViolation("bit count must be a multiple of log2(m)");
  }
  const unsigned half = bits_per_symbol_ / 2;
  auto axis = [&](std::span<const std::uint8_t> b) {
    unsigned g = 0;
    for (const auto bit : b) g = (g << 1) | (bit & 1u);
    const unsigned k = gray_decode(g);
    return 2.0 * k - (side_ - 1.0);
  };
  std::vector<Complex> out;
  out.reserve(bits.size() / bits_per_symbol_);
  for (std::size_t i = 0; i < bits.size(); i += bits_per_symbol_) {
    out.emplace_back(axis(bits.subspan(i, half)), axis(bits.subspan(i + half, half)));
  }
  return out;
}

std::vector<std::uint8_t> QamConstellation::demap(std::span<const Complex> symbols) const {
  const unsigned half = bits_per_symbol_ / 2;
  std::vector<std::uint8_t> out;
  out.reserve(symbols.size() * bits_per_symbol_);
  auto axis = [&](double level) {
    const auto k = static_cast<unsigned>(std::lround((quantize_component(level) + side_ - 1.0) / 2.0));
    const unsigned g = gray_encode(k);
    for (unsigned b = half; b-- > 0;) out.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
  };
  for (const auto& z : symbols) {
    axis(z.real());
    axis(z.imag());
  }
  return out;
}

Complex mod_m(const Complex& x, unsigned m) {
  const double w = std::sqrt(static_cast<double>(m));
  return {mod_component(x.real(), w), mod_component(x.imag(), w)};
}

CVector mod_m(const CVector& x, unsigned m) {
  CVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = mod_m(x(i), m);
  return out;
}

ThpEncoding thp_encode(const CVector& s, const OrderingPattern& order, const CMatrix& u,
                       unsigned m) {
  const Eigen::Index n = s.size();
  if (u.rows() != n || u.cols() != n || static_cast<Eigen::Index>(order.perm.size()) != n) {
    throw ContractViolation("thp_encode: dimension mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(u(i, i) - Complex{1.0, 0.0}) > 1e-12) {
      throw ContractViolation("thp_encode: feedback matrix must have unit diagonal");
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (u(i, j) != Complex{0.0, 0.0}) {
        throw ContractViolation("thp_encode: feedback matrix must be lower triangular");
      }
    }
  }

  const double w = std::sqrt(static_cast<double>(m));
  const CVector sbar = apply_order(order, s);
  ThpEncoding enc{CVector(n), CVector(n), CVector(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex pre = sbar(k);
    for (Eigen::Index j = 0; j < k; ++j) pre -= u(k, j) * enc.xbar(j);
    const Complex offset{offset_component(pre.real(), w), offset_component(pre.imag(), w)};
    enc.e(k) = offset;
    enc.xbar(k) = pre + offset;
  }
  enc.v = sbar + enc.e;
  return enc;
}

CVector receiver_detect(const CVector& v_hat, const OrderingPattern& order,
                        const QamConstellation& qam) {
  return slice(mod_m(undo_order(order, v_hat), qam.order()), qam);
}

CVector slice(const CVector& z, const QamConstellation& qam) {
  CVector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = qam.quantize(z(i));
  return out;
}

}  // namespace mbthp
