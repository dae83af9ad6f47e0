#include "dpm/velocity.hpp"

#include <algorithm>
#include <cmath>

namespace dpm {
namespace {

// Wave vector with Nyquist components removed; the velocity multiplier is
// built entirely from it so that div v = 0 holds coefficientwise.
Wavevector resolved(const Domain& d, const Wavevector& k) {
  Wavevector q{0, 0, 0};
  for (int axis = 0; axis < d.dim(); ++axis) q[axis] = d.odd_wavenumber(axis, k[axis]);
  return q;
}

}  // namespace

VelocityField velocity_from_temperature(const SpectralField& temperature) {
  const auto& d = temperature.domain();
  const int buoy = d.buoyancy_axis();
  VelocityField v;
  v.components.assign(static_cast<std::size_t>(d.dim()), SpectralField(d));
  const auto t = temperature.coeffs();
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    const Wavevector q = resolved(d, k);
    const double q2 = norm2(q);
    for (int j = 0; j < d.dim(); ++j) {
      double m = j == buoy ? -1.0 : 0.0;
      if (q2 != 0.0) m += static_cast<double>(q[j]) * q[buoy] / q2;
      v.components[static_cast<std::size_t>(j)][i] = m * t[i];
    }
  });
  return v;
}

SpectralField pressure_from_temperature(const SpectralField& temperature) {
  const auto& d = temperature.domain();
  const int buoy = d.buoyancy_axis();
  SpectralField p(d);
  const auto t = temperature.coeffs();
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    const Wavevector q = resolved(d, k);
    const double q2 = norm2(q);
    if (q2 != 0.0) p[i] = Complex(0.0, q[buoy] / q2) * t[i];
  });
  return p;
}

double spectral_divergence_max(const VelocityField& v) {
  const auto& d = v.domain();
  double worst = 0.0;
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    Complex div{};
    for (int j = 0; j < d.dim(); ++j) {
      div += static_cast<double>(d.odd_wavenumber(j, k[j])) * v.components[static_cast<std::size_t>(j)][i];
    }
    worst = std::max(worst, std::abs(div));
  });
  return worst;
}

double velocity_sup_norm(const VelocityField& v) {
  const auto& d = v.domain();
  std::vector<double> mag2(d.physical_size(), 0.0);
  for (const auto& c : v.components) {
    const auto phys = inverse_transform(c);
    for (std::size_t i = 0; i < mag2.size(); ++i) mag2[i] += phys[i] * phys[i];
  }
  return std::sqrt(*std::max_element(mag2.begin(), mag2.end()));
}

}  // namespace dpm
