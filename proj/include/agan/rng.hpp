#ifndef AGAN_RNG_HPP
#define AGAN_RNG_HPP

#include <cstdint>
#include <random>

namespace agan {

// Every stochastic component derives its engine from (run seed, stream id)
// so that adding or removing one consumer never shifts another's stream.
enum class RngStream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kNoise = 3,
  kProbe = 4,
  kAttack = 5,
  kEval = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

inline std::mt19937 make_rng(std::uint64_t seed) {
  const std::uint64_t s = splitmix64(seed);
  std::seed_seq seq{static_cast<std::uint32_t>(s),
                    static_cast<std::uint32_t>(s >> 32)};
  return std::mt19937(seq);
}

inline std::mt19937 make_rng(std::uint64_t seed, RngStream stream) {
  return make_rng(mix_seed(seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace agan

#endif  // AGAN_RNG_HPP
