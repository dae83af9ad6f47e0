#pragma once

#include <vector>

#include "dpm/spectral.hpp"

namespace dpm {

/// Darcy velocity in spectral form, one component per axis.
struct VelocityField {
  std::vector<SpectralField> components;

  const Domain& domain() const { return components.front().domain(); }
};

/// v = -(grad p + gamma T) with div v = 0, gamma = e_N (buoyancy axis N).
///
/// For k != 0: v_j(k) = (k_j k_N / |k|^2 - delta_jN) T(k), the torus form of
/// the singular-integral representation obtained from curl curl of Darcy's
/// law. The zero mode carries the uniform drift v(0) = -gamma T(0). Odd
/// factors use Nyquist-free wavenumbers so the spectral divergence vanishes
/// on every stored coefficient.
VelocityField velocity_from_temperature(const SpectralField& temperature);

/// Pressure with p(k) = i k_N T(k) / |k|^2 and p(0) = 0.
SpectralField pressure_from_temperature(const SpectralField& temperature);

/// max_k |sum_j k_j v_j(k)|, using the same wavenumbers as the derivatives.
double spectral_divergence_max(const VelocityField& v);

/// max over grid nodes of |v(x)| (Euclidean magnitude).
double velocity_sup_norm(const VelocityField& v);

}  // namespace dpm
