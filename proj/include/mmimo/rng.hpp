#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mmimo {

using Rng = std::mt19937_64;

/// Independent stream for work item `stream` (and optional `substream`) under a
/// master seed. Results never depend on which worker thread runs the item.
Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

double standard_normal(Rng& rng);

/// Circularly-symmetric complex normal, zero mean, unit variance (E|z|^2 = 1).
std::complex<double> complex_normal(Rng& rng);

}  // namespace mmimo
