#ifndef NSD_RNG_HPP
#define NSD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace nsd {

// Seeded generator with hand-rolled distributions so that a given seed
// produces the same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; draws two uniforms per call.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double pi = 3.14159265358979323846;
    return mean + stddev * r * std::cos(2.0 * pi * u2);
  }

  std::size_t bounded(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  // Fisher-Yates with our own index draws (std::shuffle's draw sequence is
  // implementation-defined).
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[bounded(i)]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

// Derives an independent stream seed from a master seed and indices
// (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (a + 1) +
                    0xbf58476d1ce4e5b9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace nsd

#endif  // NSD_RNG_HPP
