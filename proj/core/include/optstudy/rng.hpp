#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace optstudy {

// Reproducible uniform stream: std::mt19937_64 (bit-exact by the C++
// standard) with doubles formed from the top 53 bits, so results do not
// depend on a standard library's distribution implementation.
class UniformStream {
public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1): (next >> 11) * 2^-53.
  double next_unit() noexcept;

  // Uniform on {0, ..., n-1}; n must be positive.
  std::size_t next_index(std::size_t n) noexcept;

  std::uint64_t next_raw() noexcept { return engine_(); }

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of an independent sub-stream, e.g. one bootstrap replicate.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

} // namespace optstudy
