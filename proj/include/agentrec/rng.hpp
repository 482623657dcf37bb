#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace agentrec {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a stream name.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

/// Named, seeded random stream. Uses mt19937_64 (whose output sequence the
/// standard pins down) and converts to doubles and indices by hand, so runs
/// are reproducible across standard library implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view name) : engine_(derive_seed(seed, name)) {}
  explicit RandomStream(std::uint64_t raw_seed) : engine_(raw_seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// [0, n)
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace agentrec
