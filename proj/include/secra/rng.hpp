#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace secra {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of an independent substream, e.g. one dataset row. Rows can then be
// generated in any order (or in parallel) without changing the output.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

// mt19937_64 plus explicit uniform/normal transforms. The standard library's
// distributions are implementation-defined, so all sampling goes through
// fixed arithmetic: one seed, one stream, on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal, Box-Muller; keeps the spare of each generated pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  // |CN(0,1)|: two standard normals scaled by 1/sqrt(2), so E[m^2] = 1.
  double rayleigh_unit() {
    const double u = normal() * inv_sqrt2;
    const double v = normal() * inv_sqrt2;
    return std::sqrt(u * u + v * v);
  }

  // Bounded draw for shuffles. The modulo bias is ~2^-53 for any n that fits
  // a dataset index and does not affect determinism.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  static constexpr double two_pi = 6.283185307179586476925286766559;
  static constexpr double inv_sqrt2 = 0.70710678118654752440;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace secra
