#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "dpm/domain.hpp"

namespace dpm {

using Complex = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Real samples of a scalar on the grid, row-major.
class PhysicalField {
 public:
  explicit PhysicalField(Domain domain);
  PhysicalField(Domain domain, std::vector<double> values);

  static PhysicalField from_function(const Domain& domain, const std::function<double(const Point&)>& fn);

  const Domain& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  bool all_finite() const;

 private:
  Domain domain_;
  std::vector<double> values_;
};

/// Fourier coefficients of a real scalar, normalized so coeff(0) is the mean.
class SpectralField {
 public:
  explicit SpectralField(Domain domain);
  SpectralField(Domain domain, std::vector<Complex> coeffs);

  const Domain& domain() const { return domain_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  Complex operator[](std::size_t i) const { return coeffs_[i]; }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient at an arbitrary representable k (conjugating when needed).
  Complex coeff(const Wavevector& k) const;
  /// Sets coeff(k) = value and coeff(-k) = conj(value).
  void set_mode(const Wavevector& k, Complex value);

  Complex mean() const { return coeffs_[0]; }
  double max_abs() const;
  bool all_finite() const;

  /// Largest |coeff(k) - conj(coeff(-k))| over the planes whose conjugate
  /// partners are stored explicitly.
  double hermitian_defect() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  SpectralField& operator*=(Complex s);
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

 private:
  Domain domain_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

SpectralField forward_transform(const PhysicalField& u);

/// Throws std::domain_error if the input is not Hermitian to 1e-9 relative.
PhysicalField inverse_transform(const SpectralField& u);

/// Lambda^alpha = (-Delta)^(alpha/2): multiplier |k|^alpha, mean annihilated.
SpectralField fractional_laplacian(const SpectralField& u, double alpha);

/// Exact spectral derivative (multiplier i k_axis; Nyquist modes dropped).
SpectralField partial_derivative(const SpectralField& u, int axis);

/// R_axis: multiplier i k_axis / |k|, zero at k = 0.
SpectralField riesz_transform(const SpectralField& u, int axis);

/// I_beta = Lambda^(-beta): multiplier |k|^(-beta); the mean mode is dropped.
SpectralField riesz_potential(const SpectralField& u, double beta);

/// 2/3-rule truncation: zeroes coeff(k) whenever some |k_j| > n_j/3.
SpectralField dealias(const SpectralField& u);
void dealias_in_place(SpectralField& u);

/// (integral |u|^p dx)^(1/p) by the rectangle rule; p = kInfinity gives max |u|.
double lp_norm(const PhysicalField& u, double p);

/// sup |u(x)| of the trigonometric interpolant over the whole box, not just
/// the grid nodes: located on a zero-padded grid `oversample` times finer,
/// then polished by Newton iterations on the mode sum.
double sup_norm(const SpectralField& u, int oversample = 4);

/// Value of the interpolant at an arbitrary point.
double evaluate(const SpectralField& u, const Point& x);

/// Zero-padded copy of u on a grid `factor` times finer along every axis.
SpectralField zero_pad(const SpectralField& u, int factor);

/// ||Lambda^s u||_{L^2} computed from the coefficients, mean excluded.
double hs_seminorm(const SpectralField& u, double s);

/// integral of u * w over the box (both real), from the coefficients.
double inner_product(const SpectralField& u, const SpectralField& w);

}  // namespace dpm
