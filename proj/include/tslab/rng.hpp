#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tslab {

// splitmix64 step; used both as a seed scrambler and to derive
// independent stream seeds (per MC chunk, per SGD step, ...).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL + stream * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

// Deterministic Gaussian source. mt19937_64 is fully specified by the
// standard; uniforms and Box-Muller are done explicitly so the stream is
// identical across platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(scramble(seed)) {}

  // uniform in (0, 1]; never returns exactly 0 so log() below is safe
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    return static_cast<double>(bits + 1) * 0x1.0p-53;
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  static std::uint64_t scramble(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64(s);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tslab
