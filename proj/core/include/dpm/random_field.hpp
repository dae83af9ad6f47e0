#pragma once

#include <cstdint>

#include "dpm/spectral.hpp"

namespace dpm {

/// Smooth random data: |T(k)| = |k|^(-r) exp(-|k|^2 / K^2) with uniformly
/// random phases, Hermitian, mean-zero and Nyquist-free. The phase stream
/// is derived from the raw 64-bit Mersenne Twister output, so a seed gives
/// the same field on every platform.
SpectralField random_smooth_field(const Domain& domain, double r, double cutoff, std::uint64_t seed);

/// Rescales u so that its L^2 norm equals `target` (no-op for a zero field).
void normalize_l2(SpectralField& u, double target);

}  // namespace dpm
