#ifndef EVIL_RNG_H_
#define EVIL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace evil {

using Rng = std::mt19937_64;

// Mixes a base seed with a list of stream keys (generation, member, ...)
// into an independent 64-bit seed. Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> keys);

inline Rng make_rng(std::uint64_t base,
                    std::initializer_list<std::uint64_t> keys = {}) {
  return Rng(derive_seed(base, keys));
}

// Stream tags, so independent consumers of one seed never collide.
enum class Stream : std::uint64_t {
  kPolicy = 0x70,
  kEnvironment = 0x71,
  kInit = 0x72,
  kNoise = 0x73,
  kInner = 0x74,
  kDiscriminator = 0x75,
  kReset = 0x76,
  kBatch = 0x77,
  kVariant = 0x78,
  kExperiment = 0x79,
};

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace evil

#endif  // EVIL_RNG_H_
