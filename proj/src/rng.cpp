#include "mmimo/rng.hpp"

#include <cmath>

namespace mmimo {

Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),      static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  return Rng(seq);
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

std::complex<double> complex_normal(Rng& rng) {
  // Marsaglia polar method; both outputs are used.
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-std::log(s) / s);  // sqrt(-2 ln s / s) / sqrt(2)
  return {u * f, v * f};
}

}  // namespace mmimo
