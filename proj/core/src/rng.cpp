#include "mbthp/rng.hpp"

#include <cmath>

namespace mbthp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(const StreamKey& key) {
  const std::uint64_t a = splitmix64(key.seed);
  const std::uint64_t b = splitmix64(a ^ key.trial);
  const std::uint64_t c = splitmix64(b ^ static_cast<std::uint64_t>(key.stream));
  std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() { return uniform_(engine_); }

double RngStream::normal() { return normal_(engine_); }

Complex RngStream::complex_normal() {
  static const double kScale = 1.0 / std::sqrt(2.0);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kScale * re, kScale * im};
}

CMatrix RngStream::complex_gaussian(Eigen::Index rows, Eigen::Index cols) {
  CMatrix g(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      g(i, j) = complex_normal();
    }
  }
  return g;
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform_(engine_) < p;
}

}  // namespace mbthp
