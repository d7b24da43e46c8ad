#pragma once

#include <cstdint>
#include <random>

#include "mbthp/linalg.hpp"

namespace mbthp {

// Independent random streams used by one trial. Two schemes that share a
// (seed, trial) pair see identical draws on every stream.
enum class StreamId : std::uint64_t {
  kSourceRelay = 1,
  kRelayDestination = 2,
  kData = 3,
  kNoise = 4,
  kSideInfo = 5,
  kFsbTraining = 6,
  kAuxiliary = 7,
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  StreamId stream = StreamId::kAuxiliary;
};

/// Deterministic generator keyed by (seed, trial, stream). The key is mixed
/// with splitmix64 before seeding the engine.
class RngStream {
 public:
  explicit RngStream(const StreamKey& key);

  std::mt19937_64& engine() { return engine_; }

  double uniform();
  double normal();
  /// Circular complex Gaussian with unit variance (N(0, 1/2) per component).
  Complex complex_normal();
  CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols);
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mbthp
