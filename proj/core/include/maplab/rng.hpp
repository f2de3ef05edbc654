#pragma once

#include <cmath>
#include <cstdint>

namespace maplab {

// Counter-based random streams. A stream is keyed by (seed, i, j); the value
// sequence within a stream is fixed, so parallel generation over i or j is
// order-independent and results are bit-exact across worker counts.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t i = 0, std::uint64_t j = 0)
      : state_(mix(mix(mix(0x9e3779b97f4a7c15ull ^ seed) + i) + j)) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in (0,1)
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal, Box-Muller
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  double exponential() { return -std::log(uniform()); }

  // Gamma(shape, 1), Marsaglia-Tsang with boost for shape < 1
  double gamma(double shape) {
    if (shape < 1.0) {
      // boost: Gamma(a) = Gamma(a+1) * U^{1/a}
      double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    return z ^ (z >> 33);
  }

  std::uint64_t state_;
};

}  // namespace maplab
