#ifndef SPECBIAS_RNG_HPP
#define SPECBIAS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace specbias {

/// SplitMix64: 64-bit state, fixed-increment generator (Steele et al.).
/// Every operation is integer arithmetic plus a libm-free unit-interval
/// conversion, so streams are identical across platforms for a given
/// seed. Quality is sufficient for the Monte-Carlo checks used here.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1]; never 0, so it is safe under log().
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derive an independent stream seed from a base seed and tags. Used to
/// give every sweep cell its own generator so that results do not depend
/// on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) {
  SplitMix64 mix(base ^ (tag_a * 0x9e3779b97f4a7c15ull) ^
                 (tag_b * 0xc2b2ae3d27d4eb4full));
  mix.next_u64();
  return mix.next_u64();
}

}  // namespace specbias

#endif  // SPECBIAS_RNG_HPP
