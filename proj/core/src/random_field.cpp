#include "dpm/random_field.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dpm {

SpectralField random_smooth_field(const Domain& domain, double r, double cutoff, std::uint64_t seed) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("spectral cutoff K must be positive");
  std::mt19937_64 engine(seed);
  SpectralField u(domain);
  const int last = domain.dim() - 1;
  domain.for_each_mode([&](std::size_t, const Wavevector& k) {
    // One draw per stored mode keeps the stream independent of which modes
    // end up being skipped.
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    const double k2 = norm2(k);
    if (k2 == 0.0) return;
    for (int axis = 0; axis < domain.dim(); ++axis) {
      if (domain.is_nyquist(axis, k[axis])) return;
    }
    // On the k_last = 0 plane only one of each +/-k pair is independent.
    if (k[last] == 0) {
      for (int axis = 0; axis < last; ++axis) {
        if (k[axis] < 0) return;
        if (k[axis] > 0) break;
      }
    }
    const double amp = std::pow(k2, -0.5 * r) * std::exp(-k2 / (cutoff * cutoff));
    u.set_mode(k, std::polar(amp, kTwoPi * unit));
  });
  return u;
}

void normalize_l2(SpectralField& u, double target) {
  const double h0 = hs_seminorm(u, 0.0);
  const double current = std::sqrt(h0 * h0 + u.domain().volume() * std::norm(u.mean()));
  if (current > 0.0) u *= target / current;
}

}  // namespace dpm
