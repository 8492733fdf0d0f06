#include "optstudy/rng.hpp"

namespace optstudy {

double UniformStream::next_unit() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t UniformStream::next_index(std::size_t n) noexcept {
  auto i = static_cast<std::size_t>(next_unit() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

} // namespace optstudy
