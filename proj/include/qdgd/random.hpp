#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace qdgd {

// Purpose tags mixed into every keyed stream so that graph, data, objective and
// quantizer randomness never share a substream.
enum class StreamDomain : std::uint64_t {
  graph = 1,
  objective = 2,
  dataset = 3,
  quantize = 4,
  shuffle = 5,
  test = 6,
};

/// Counter-keyed random stream.
///
/// A stream is identified by a tuple of integer keys (seed, domain, replication,
/// node, iteration, ...). Two streams with the same key tuple produce the same
/// sequence; different tuples are statistically independent. The generator is
/// SplitMix64 over a hashed key, which makes construction cheap enough to create
/// one stream per quantizer call.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t state) : state_(state) {}

  static Stream keyed(std::uint64_t seed, StreamDomain domain,
                      std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t h = mix(seed ^ 0x243f6a8885a308d3ULL);
    h = mix(h ^ (static_cast<std::uint64_t>(domain) * 0x9e3779b97f4a7c15ULL));
    std::uint64_t slot = 1;
    for (std::uint64_t k : keys) {
      h = mix(h ^ (k + slot * 0xbf58476d1ce4e5b9ULL));
      ++slot;
    }
    return Stream(h);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(*this); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace qdgd
