#include "dpm/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dpm {

Domain::Domain(int dim, std::vector<int> sizes, int buoyancy_axis)
    : dim_(dim), sizes_(std::move(sizes)), buoyancy_axis_(buoyancy_axis) {
  if (dim_ < 1 || dim_ > 3) {
    throw std::invalid_argument("domain dimension must be 1, 2 or 3, got " + std::to_string(dim_));
  }
  if (static_cast<int>(sizes_.size()) != dim_) {
    throw std::invalid_argument("domain needs one grid size per axis");
  }
  for (int n : sizes_) {
    if (n < 8 || n % 2 != 0) {
      throw std::invalid_argument("grid sizes must be even and >= 8, got " + std::to_string(n));
    }
  }
  if (buoyancy_axis_ < 0) buoyancy_axis_ = dim_ - 1;
  if (buoyancy_axis_ >= dim_) {
    throw std::invalid_argument("buoyancy axis out of range");
  }
  for (int axis = 0; axis < dim_; ++axis) {
    physical_size_ *= static_cast<std::size_t>(sizes_[axis]);
    spectral_size_ *= static_cast<std::size_t>(spectral_extent(axis));
  }
}

Domain Domain::cube(int dim, int n, int buoyancy_axis) {
  return Domain(dim, std::vector<int>(static_cast<std::size_t>(std::max(dim, 0)), n), buoyancy_axis);
}

double Domain::volume() const { return std::pow(kTwoPi, dim_); }

double Domain::min_spacing() const {
  return kTwoPi / *std::max_element(sizes_.begin(), sizes_.end());
}

int Domain::spectral_extent(int axis) const {
  return axis == dim_ - 1 ? sizes_[axis] / 2 + 1 : sizes_[axis];
}

Point Domain::node(std::size_t index) const {
  Point x{0.0, 0.0, 0.0};
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    const auto n = static_cast<std::size_t>(sizes_[axis]);
    x[axis] = kTwoPi * static_cast<double>(index % n) / static_cast<double>(n);
    index /= n;
  }
  return x;
}

int Domain::wavenumber(int axis, int i) const {
  if (axis == dim_ - 1) return i;
  const int n = sizes_[axis];
  return i <= n / 2 ? i : i - n;
}

bool Domain::contains(const Wavevector& k) const {
  for (int axis = 0; axis < 3; ++axis) {
    if (axis >= dim_) {
      if (k[axis] != 0) return false;
      continue;
    }
    if (2 * std::abs(k[axis]) > sizes_[axis]) return false;
  }
  return true;
}

std::size_t Domain::mode_index(const Wavevector& k, bool& conjugate) const {
  if (!contains(k)) throw std::out_of_range("wave vector not representable on this grid");
  Wavevector q = k;
  conjugate = q[dim_ - 1] < 0;
  if (conjugate) {
    for (int axis = 0; axis < dim_; ++axis) q[axis] = -q[axis];
  }
  std::size_t idx = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    const int n = sizes_[axis];
    int i = q[axis];
    if (axis != dim_ - 1) {
      i = ((i % n) + n) % n;
    } else if (i == -n / 2) {
      i = n / 2;
    }
    idx = idx * static_cast<std::size_t>(spectral_extent(axis)) + static_cast<std::size_t>(i);
  }
  return idx;
}

}  // namespace dpm
