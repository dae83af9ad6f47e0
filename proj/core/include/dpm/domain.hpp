#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

namespace dpm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Integer wave vector; components beyond the domain dimension are zero.
using Wavevector = std::array<int, 3>;

/// Grid coordinates of a node; components beyond the domain dimension are zero.
using Point = std::array<double, 3>;

/// Periodic box [0, 2pi)^dim sampled on a uniform grid.
///
/// Spectral coefficients are stored in the real-to-complex half layout: every
/// axis but the last holds all n_j wavenumbers in FFT order (0, 1, ..., n/2,
/// -n/2+1, ..., -1), the last axis holds k = 0..n/2. The buoyancy direction
/// (gamma = e_N) defaults to the last axis.
class Domain {
 public:
  Domain(int dim, std::vector<int> sizes, int buoyancy_axis = -1);

  /// Equal resolution along every axis.
  static Domain cube(int dim, int n, int buoyancy_axis = -1);

  int dim() const { return dim_; }
  int size(int axis) const { return sizes_[axis]; }
  const std::vector<int>& sizes() const { return sizes_; }
  int buoyancy_axis() const { return buoyancy_axis_; }

  /// First positive eigenvalue of Lambda; 1 for period 2pi.
  double lambda1() const { return 1.0; }

  /// Lebesgue measure of the box, (2pi)^dim.
  double volume() const;
  double spacing(int axis) const { return kTwoPi / sizes_[axis]; }
  double min_spacing() const;

  std::size_t physical_size() const { return physical_size_; }
  std::size_t spectral_size() const { return spectral_size_; }
  /// Stored extent of axis in the half-spectrum layout.
  int spectral_extent(int axis) const;

  /// Grid coordinates of physical node `index` (row-major).
  Point node(std::size_t index) const;

  /// Signed wavenumber stored at position `i` along `axis`.
  int wavenumber(int axis, int i) const;
  bool is_nyquist(int axis, int k) const { return 2 * (k < 0 ? -k : k) == sizes_[axis]; }
  /// Wavenumber used by odd multipliers: Nyquist components map to 0.
  int odd_wavenumber(int axis, int k) const { return is_nyquist(axis, k) ? 0 : k; }

  /// Storage index of k, or of -k when k is only available through its
  /// conjugate. `conjugate` reports which case applied.
  std::size_t mode_index(const Wavevector& k, bool& conjugate) const;
  /// True if k is representable, i.e. |k_j| <= n_j/2 on every axis.
  bool contains(const Wavevector& k) const;

  /// Calls fn(storage_index, k) for every stored coefficient.
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    const int e0 = dim_ == 3 ? sizes_[0] : 1;
    const int e1 = dim_ >= 2 ? sizes_[dim_ - 2] : 1;
    const int e2 = sizes_[dim_ - 1] / 2 + 1;
    std::size_t idx = 0;
    Wavevector k{0, 0, 0};
    for (int a = 0; a < e0; ++a) {
      if (dim_ == 3) k[0] = wavenumber(0, a);
      for (int b = 0; b < e1; ++b) {
        if (dim_ >= 2) k[dim_ - 2] = wavenumber(dim_ - 2, b);
        for (int c = 0; c < e2; ++c) {
          k[dim_ - 1] = c;
          fn(idx++, static_cast<const Wavevector&>(k));
        }
      }
    }
  }

  bool operator==(const Domain& other) const = default;

 private:
  int dim_;
  std::vector<int> sizes_;
  int buoyancy_axis_;
  std::size_t physical_size_ = 1;
  std::size_t spectral_size_ = 1;
};

/// |k|^2 as a double.
inline double norm2(const Wavevector& k) {
  return static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
         static_cast<double>(k[2]) * k[2];
}

}  // namespace dpm
