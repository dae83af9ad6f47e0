#include "dpm/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace dpm {
namespace {

void require_same_domain(const Domain& a, const Domain& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different domains");
}

template <class Multiplier>
SpectralField apply_multiplier(const SpectralField& u, Multiplier&& m) {
  SpectralField out(u.domain());
  auto src = u.coeffs();
  auto dst = out.coeffs();
  u.domain().for_each_mode([&](std::size_t i, const Wavevector& k) { dst[i] = m(k) * src[i]; });
  return out;
}

void check_axis(const Domain& d, int axis) {
  if (axis < 0 || axis >= d.dim()) {
    throw std::invalid_argument("axis " + std::to_string(axis) + " out of range for a " +
                                std::to_string(d.dim()) + "-dimensional domain");
  }
}

// Number of full-spectrum coefficients represented by a stored one.
double half_weight(const Domain& d, const Wavevector& k) {
  const int last = k[d.dim() - 1];
  return (last == 0 || 2 * last == d.size(d.dim() - 1)) ? 1.0 : 2.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// PhysicalField

PhysicalField::PhysicalField(Domain domain)
    : domain_(std::move(domain)), values_(domain_.physical_size(), 0.0) {}

PhysicalField::PhysicalField(Domain domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.physical_size()) {
    throw std::invalid_argument("physical field size does not match the grid");
  }
}

PhysicalField PhysicalField::from_function(const Domain& domain,
                                           const std::function<double(const Point&)>& fn) {
  PhysicalField u(domain);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = fn(domain.node(i));
  return u;
}

bool PhysicalField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(Domain domain)
    : domain_(std::move(domain)), coeffs_(domain_.spectral_size(), Complex{}) {}

SpectralField::SpectralField(Domain domain, std::vector<Complex> coeffs)
    : domain_(std::move(domain)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != domain_.spectral_size()) {
    throw std::invalid_argument("spectral field size does not match the grid");
  }
}

Complex SpectralField::coeff(const Wavevector& k) const {
  bool conj = false;
  const auto idx = domain_.mode_index(k, conj);
  return conj ? std::conj(coeffs_[idx]) : coeffs_[idx];
}

void SpectralField::set_mode(const Wavevector& k, Complex value) {
  Wavevector minus{-k[0], -k[1], -k[2]};
  bool conj = false;
  auto idx = domain_.mode_index(k, conj);
  coeffs_[idx] = conj ? std::conj(value) : value;
  idx = domain_.mode_index(minus, conj);
  coeffs_[idx] = conj ? value : std::conj(value);
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::norm(c));
  return std::sqrt(m);
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double SpectralField::hermitian_defect() const {
  // Only the planes k_last = 0 and k_last = n/2 hold both members of a pair.
  const int dim = domain_.dim();
  const std::size_t m = static_cast<std::size_t>(domain_.spectral_extent(dim - 1));
  const std::size_t rows = coeffs_.size() / m;
  const int n0 = dim == 3 ? domain_.size(0) : 1;
  const int n1 = dim >= 2 ? domain_.size(dim - 2) : 1;
  double defect = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const int a = static_cast<int>(r) / n1;
    const int b = static_cast<int>(r) % n1;
    const std::size_t partner = static_cast<std::size_t>(((n0 - a) % n0) * n1 + (n1 - b) % n1);
    for (std::size_t c : {std::size_t{0}, m - 1}) {
      defect = std::max(defect, std::norm(coeffs_[r * m + c] - std::conj(coeffs_[partner * m + c])));
    }
  }
  return std::sqrt(defect);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_domain(domain_, other.domain_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_domain(domain_, other.domain_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  require_same_domain(domain_, other.domain_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

// ---------------------------------------------------------------------------
// Transforms

SpectralField forward_transform(const PhysicalField& u) {
  SpectralField out(u.domain());
  detail::r2c(u.domain(), u.values().data(), out.coeffs().data());
  out *= 1.0 / static_cast<double>(u.domain().physical_size());
  return out;
}

PhysicalField inverse_transform(const SpectralField& u) {
  const double scale = std::max(u.max_abs(), std::numeric_limits<double>::min());
  if (u.hermitian_defect() > 1e-9 * scale) {
    throw std::domain_error("spectral field is not Hermitian; it does not represent a real field");
  }
  std::vector<Complex> work(u.coeffs().begin(), u.coeffs().end());
  PhysicalField out(u.domain());
  detail::c2r(u.domain(), work.data(), out.values().data());
  return out;
}

// ---------------------------------------------------------------------------
// Multipliers

SpectralField fractional_laplacian(const SpectralField& u, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("fractional order alpha must lie in [0, 2]");
  }
  return apply_multiplier(u, [alpha](const Wavevector& k) {
    const double k2 = norm2(k);
    return k2 == 0.0 ? 0.0 : std::pow(k2, 0.5 * alpha);
  });
}

SpectralField partial_derivative(const SpectralField& u, int axis) {
  const auto& d = u.domain();
  check_axis(d, axis);
  return apply_multiplier(u, [&](const Wavevector& k) {
    return Complex(0.0, d.odd_wavenumber(axis, k[axis]));
  });
}

SpectralField riesz_transform(const SpectralField& u, int axis) {
  const auto& d = u.domain();
  check_axis(d, axis);
  return apply_multiplier(u, [&](const Wavevector& k) {
    const double k2 = norm2(k);
    if (k2 == 0.0) return Complex{};
    return Complex(0.0, d.odd_wavenumber(axis, k[axis]) / std::sqrt(k2));
  });
}

SpectralField riesz_potential(const SpectralField& u, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("Riesz potential order must be positive");
  return apply_multiplier(u, [beta](const Wavevector& k) {
    const double k2 = norm2(k);
    return k2 == 0.0 ? 0.0 : std::pow(k2, -0.5 * beta);
  });
}

void dealias_in_place(SpectralField& u) {
  const auto& d = u.domain();
  auto c = u.coeffs();
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    for (int axis = 0; axis < d.dim(); ++axis) {
      if (3 * std::abs(k[axis]) > d.size(axis)) {
        c[i] = 0.0;
        return;
      }
    }
  });
}

SpectralField dealias(const SpectralField& u) {
  SpectralField out = u;
  dealias_in_place(out);
  return out;
}

// ---------------------------------------------------------------------------
// Norms

double lp_norm(const PhysicalField& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm needs p >= 1");
  const auto v = u.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (double x : v) sum += x * x;
  } else if (p == 1.0) {
    for (double x : v) sum += std::abs(x);
  } else {
    for (double x : v) sum += std::pow(std::abs(x), p);
  }
  const double cell = u.domain().volume() / static_cast<double>(v.size());
  return std::pow(sum * cell, 1.0 / p);
}

namespace {

bool has_nyquist(const Domain& d, const Wavevector& k) {
  for (int axis = 0; axis < d.dim(); ++axis) {
    if (d.is_nyquist(axis, k[axis])) return true;
  }
  return false;
}

// Value, gradient and Hessian of the interpolant at x (Nyquist modes excluded).
struct LocalJet {
  double value = 0.0;
  std::array<double, 3> grad{};
  std::array<std::array<double, 3>, 3> hess{};
};

LocalJet local_jet(const SpectralField& u, const Point& x) {
  const auto& d = u.domain();
  const int dim = d.dim();
  // Per-axis phase tables e^{i k x_j}, indexed by storage position.
  std::array<std::vector<Complex>, 3> phase;
  for (int axis = 0; axis < dim; ++axis) {
    const int ext = d.spectral_extent(axis);
    phase[axis].resize(static_cast<std::size_t>(ext));
    for (int i = 0; i < ext; ++i) phase[axis][static_cast<std::size_t>(i)] = std::polar(1.0, d.wavenumber(axis, i) * x[axis]);
  }
  LocalJet jet;
  const auto c = u.coeffs();
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    if (c[i] == Complex{} || has_nyquist(d, k)) return;
    Complex e = c[i] * half_weight(d, k);
    for (int axis = 0; axis < dim; ++axis) {
      const int n = d.size(axis);
      const int pos = axis == dim - 1 ? k[axis] : (k[axis] + n) % n;
      e *= phase[axis][static_cast<std::size_t>(pos)];
    }
    jet.value += e.real();
    for (int a = 0; a < dim; ++a) {
      jet.grad[a] -= k[a] * e.imag();
      for (int b = 0; b < dim; ++b) jet.hess[a][b] -= static_cast<double>(k[a]) * k[b] * e.real();
    }
  });
  return jet;
}

// Solves h * s = g for dim <= 3 by Gaussian elimination; false if singular.
bool solve_small(int dim, std::array<std::array<double, 3>, 3> h, std::array<double, 3> g, std::array<double, 3>& s) {
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    for (int r = col + 1; r < dim; ++r) {
      if (std::abs(h[r][col]) > std::abs(h[piv][col])) piv = r;
    }
    if (std::abs(h[piv][col]) < 1e-300) return false;
    std::swap(h[piv], h[col]);
    std::swap(g[piv], g[col]);
    for (int r = col + 1; r < dim; ++r) {
      const double f = h[r][col] / h[col][col];
      for (int cc = col; cc < dim; ++cc) h[r][cc] -= f * h[col][cc];
      g[r] -= f * g[col];
    }
  }
  for (int r = dim - 1; r >= 0; --r) {
    double acc = g[r];
    for (int cc = r + 1; cc < dim; ++cc) acc -= h[r][cc] * s[cc];
    s[r] = acc / h[r][r];
  }
  return true;
}

}  // namespace

SpectralField zero_pad(const SpectralField& u, int factor) {
  if (factor < 1) throw std::invalid_argument("zero-padding factor must be >= 1");
  const auto& d = u.domain();
  std::vector<int> sizes = d.sizes();
  for (auto& n : sizes) n *= factor;
  SpectralField out(Domain(d.dim(), sizes, d.buoyancy_axis()));
  const auto src = u.coeffs();
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    if (has_nyquist(d, k)) return;
    bool conj = false;
    out[out.domain().mode_index(k, conj)] = src[i];
  });
  return out;
}

double evaluate(const SpectralField& u, const Point& x) { return local_jet(u, x).value; }

double sup_norm(const SpectralField& u, int oversample) {
  const auto& d = u.domain();
  const auto fine = inverse_transform(zero_pad(u, oversample));
  const auto& fd = fine.domain();
  const auto v = fine.values();

  // Local maxima of |u| on the fine grid, best first.
  std::vector<std::pair<double, std::size_t>> candidates;
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int axis = d.dim() - 2; axis >= 0; --axis) stride[axis] = stride[axis + 1] * static_cast<std::size_t>(fd.size(axis + 1));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    bool local_max = true;
    for (int axis = 0; axis < d.dim() && local_max; ++axis) {
      const auto n = static_cast<std::size_t>(fd.size(axis));
      const std::size_t pos = (i / stride[axis]) % n;
      const std::size_t base = i - pos * stride[axis];
      const std::size_t up = base + ((pos + 1) % n) * stride[axis];
      const std::size_t down = base + ((pos + n - 1) % n) * stride[axis];
      local_max = a >= std::abs(v[up]) && a >= std::abs(v[down]);
    }
    if (local_max) candidates.emplace_back(a, i);
  }
  if (candidates.empty()) return lp_norm(fine, kInfinity);
  const std::size_t keep = std::min<std::size_t>(4, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });

  double best = candidates.front().first;
  for (std::size_t c = 0; c < keep; ++c) {
    Point x = fd.node(candidates[c].second);
    LocalJet jet = local_jet(u, x);
    const double sign = jet.value < 0.0 ? -1.0 : 1.0;
    double current = std::abs(jet.value);
    for (int iter = 0; iter < 20; ++iter) {
      std::array<double, 3> step{};
      if (!solve_small(d.dim(), jet.hess, jet.grad, step)) break;
      Point trial = x;
      for (int axis = 0; axis < d.dim(); ++axis) trial[axis] -= step[axis];
      const LocalJet next = local_jet(u, trial);
      if (sign * next.value <= current) break;
      const double gain = sign * next.value - current;
      x = trial;
      jet = next;
      current = sign * next.value;
      if (gain <= 1e-16 * current) break;
    }
    best = std::max(best, current);
  }
  return best;
}

double hs_seminorm(const SpectralField& u, double s) {
  const auto& d = u.domain();
  const auto c = u.coeffs();
  double sum = 0.0;
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    const double k2 = norm2(k);
    if (k2 == 0.0) return;
    const double w = s == 0.0 ? 1.0 : std::pow(k2, s);
    sum += half_weight(d, k) * w * std::norm(c[i]);
  });
  return std::sqrt(d.volume() * sum);
}

double inner_product(const SpectralField& u, const SpectralField& w) {
  require_same_domain(u.domain(), w.domain());
  const auto& d = u.domain();
  const auto a = u.coeffs();
  const auto b = w.coeffs();
  double sum = 0.0;
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    sum += half_weight(d, k) * (a[i] * std::conj(b[i])).real();
  });
  return d.volume() * sum;
}

}  // namespace dpm
