#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dpm/random_field.hpp"
#include "dpm/spectral.hpp"
#include "support/oracles.hpp"

using namespace dpm;

namespace {

PhysicalField noise(const Domain& d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PhysicalField f(d);
  for (auto& x : f.values()) x = u(rng);
  return f;
}

double max_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("forward transform matches direct summation") {
  const Domain domains[] = {Domain(1, {16}), Domain(2, {8, 12}), Domain(3, {8, 8, 10})};
  for (const auto& d : domains) {
    const auto f = noise(d, 7);
    const auto fh = forward_transform(f);
    std::vector<double> vals(f.values().begin(), f.values().end());
    double worst = 0.0;
    d.for_each_mode([&](std::size_t i, const Wavevector& k) {
      worst = std::max(worst, std::abs(fh[i] - oracle::direct_coefficient(d, vals, k)));
    });
    CHECK(worst < 1e-14);
  }
}

TEST_CASE("roundtrip is the identity") {
  for (int dim = 1; dim <= 3; ++dim) {
    const Domain d = Domain::cube(dim, dim == 3 ? 8 : 32);
    const auto f = noise(d, 11u + static_cast<unsigned>(dim));
    CHECK(max_diff(inverse_transform(forward_transform(f)), f) < 1e-14);
  }
}

TEST_CASE("coefficient of a single mode") {
  const Domain d(2, {16, 16});
  const auto f = PhysicalField::from_function(d, [](const Point& x) { return 3.0 * std::cos(2 * x[0] - x[1]) + 0.5; });
  const auto fh = forward_transform(f);
  CHECK(std::abs(fh.coeff({2, -1, 0}) - Complex(1.5, 0.0)) < 1e-14);
  CHECK(std::abs(fh.coeff({-2, 1, 0}) - Complex(1.5, 0.0)) < 1e-14);
  CHECK(std::abs(fh.mean() - 0.5) < 1e-15);
  CHECK(std::abs(fh.coeff({1, 1, 0})) < 1e-14);
}

TEST_CASE("set_mode keeps the field real") {
  const Domain d(2, {8, 8});
  SpectralField u(d);
  u.set_mode({1, -2, 0}, Complex(0.3, -0.7));
  CHECK(u.hermitian_defect() == 0.0);
  CHECK(std::abs(u.coeff({-1, 2, 0}) - Complex(0.3, 0.7)) < 1e-16);
  const auto f = inverse_transform(u);
  const auto x = d.node(13);
  CHECK(f[13] == doctest::Approx(0.6 * std::cos(x[0] - 2 * x[1]) + 1.4 * std::sin(x[0] - 2 * x[1])).epsilon(1e-13));
}

TEST_CASE("non-Hermitian input is rejected") {
  const Domain d(2, {8, 8});
  SpectralField u(d);
  bool conj = false;
  u[d.mode_index({1, 0, 0}, conj)] = 1.0;  // partner (-1, 0) left at zero
  CHECK(u.hermitian_defect() > 0.5);
  CHECK_THROWS_AS(inverse_transform(u), std::domain_error);

  SpectralField v(Domain(1, {8}));
  v[0] = Complex(1.0, 1.0);  // complex mean
  CHECK(v.hermitian_defect() > 0.5);
  CHECK_THROWS_AS(inverse_transform(v), std::domain_error);
}

TEST_CASE("field arithmetic") {
  const Domain d(1, {8});
  SpectralField a(d), b(d);
  a.set_mode({1, 0, 0}, 1.0);
  b.set_mode({2, 0, 0}, 2.0);
  const auto c = a + 2.0 * b;
  CHECK(c.coeff({2, 0, 0}) == Complex(4.0, 0.0));
  auto e = c - a;
  CHECK(e.coeff({1, 0, 0}) == Complex(0.0, 0.0));
  e.axpy(-2.0, b);
  CHECK(e.max_abs() == 0.0);
  SpectralField other(Domain(1, {16}));
  CHECK_THROWS_AS(a += other, std::invalid_argument);
  CHECK_THROWS_AS(PhysicalField(d, std::vector<double>(3)), std::invalid_argument);
  CHECK_THROWS_AS(SpectralField(d, std::vector<Complex>(3)), std::invalid_argument);
}

TEST_CASE("spectral derivative of a trigonometric polynomial") {
  const Domain d(2, {32, 32});
  const auto f = PhysicalField::from_function(d, [](const Point& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]); });
  const auto dx = inverse_transform(partial_derivative(forward_transform(f), 0));
  const auto dy = inverse_transform(partial_derivative(forward_transform(f), 1));
  const auto ex = PhysicalField::from_function(d, [](const Point& x) { return 3 * std::cos(3 * x[0]) * std::cos(2 * x[1]); });
  const auto ey = PhysicalField::from_function(d, [](const Point& x) { return -2 * std::sin(3 * x[0]) * std::sin(2 * x[1]); });
  CHECK(max_diff(dx, ex) < 1e-13);
  CHECK(max_diff(dy, ey) < 1e-13);
  CHECK_THROWS_AS(partial_derivative(forward_transform(f), 2), std::invalid_argument);
}

TEST_CASE("derivative drops the Nyquist mode") {
  const Domain d(1, {8});
  const auto f = PhysicalField::from_function(d, [](const Point& x) { return std::cos(4 * x[0]); });
  CHECK(partial_derivative(forward_transform(f), 0).max_abs() < 1e-15);
}

TEST_CASE("fractional Laplacian multiplier") {
  const Domain d(2, {16, 16});
  const auto f = PhysicalField::from_function(d, [](const Point& x) { return 2.0 + std::sin(3 * x[0] + 4 * x[1]); });
  const auto fh = forward_transform(f);
  for (double alpha : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const auto g = inverse_transform(fractional_laplacian(fh, alpha));
    const double scale = std::pow(5.0, alpha);
    const auto expected = PhysicalField::from_function(d, [&](const Point& x) { return scale * std::sin(3 * x[0] + 4 * x[1]); });
    CHECK(max_diff(g, expected) < 1e-12);
  }
  CHECK_THROWS_AS(fractional_laplacian(fh, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(fractional_laplacian(fh, 2.1), std::invalid_argument);
}

TEST_CASE("Lambda^2 equals minus the Laplacian") {
  const Domain d = Domain::cube(3, 8);
  auto u = random_smooth_field(d, 1.0, 3.0, 5);
  const auto lap = fractional_laplacian(u, 2.0);
  SpectralField minus_delta(d);
  for (int axis = 0; axis < 3; ++axis) minus_delta -= partial_derivative(partial_derivative(u, axis), axis);
  CHECK(max_diff(lap, minus_delta) < 1e-14);
}

TEST_CASE("fractional powers compose") {
  const Domain d(2, {16, 16});
  const auto u = random_smooth_field(d, 1.0, 4.0, 9);
  for (double a : {0.3, 0.7}) {
    for (double b : {0.5, 1.1}) {
      const auto lhs = fractional_laplacian(fractional_laplacian(u, a), b);
      const auto rhs = fractional_laplacian(u, a + b);
      CHECK(max_diff(lhs, rhs) < 1e-13 * rhs.max_abs() + 1e-16);
    }
  }
  const auto back = riesz_potential(fractional_laplacian(u, 1.3), 1.3);
  CHECK(max_diff(back, u) < 1e-14);
  CHECK_THROWS_AS(riesz_potential(u, 0.0), std::invalid_argument);
}

TEST_CASE("Riesz transforms: sum of squares is minus identity on mean-zero data") {
  const Domain d(2, {16, 16});
  const auto u = random_smooth_field(d, 1.0, 4.0, 3);
  SpectralField sum(d);
  for (int j = 0; j < 2; ++j) sum += riesz_transform(riesz_transform(u, j), j);
  sum += u;
  CHECK(sum.max_abs() < 1e-15);
}

TEST_CASE("Riesz transform relates derivative and Lambda") {
  const Domain d(2, {16, 16});
  const auto u = random_smooth_field(d, 1.0, 4.0, 4);
  CHECK(max_diff(riesz_transform(fractional_laplacian(u, 1.0), 0), partial_derivative(u, 0)) < 1e-14);
}

TEST_CASE("dealiasing keeps exactly the modes with |k_j| <= n_j/3") {
  const Domain d(2, {12, 12});
  SpectralField u(d);
  for (auto& c : u.coeffs()) c = 1.0;
  const auto v = dealias(u);
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    const bool keep = std::abs(k[0]) <= 4 && std::abs(k[1]) <= 4;
    CHECK(v[i] == Complex(keep ? 1.0 : 0.0, 0.0));
  });
}

TEST_CASE("Lp norms of a constant and a sine") {
  const Domain d(2, {32, 32});
  const PhysicalField c(d, std::vector<double>(d.physical_size(), -2.0));
  const double vol = d.volume();
  CHECK(lp_norm(c, 1.0) == doctest::Approx(2.0 * vol).epsilon(1e-14));
  CHECK(lp_norm(c, 2.0) == doctest::Approx(2.0 * std::sqrt(vol)).epsilon(1e-14));
  CHECK(lp_norm(c, 3.0) == doctest::Approx(2.0 * std::cbrt(vol)).epsilon(1e-14));
  CHECK(lp_norm(c, kInfinity) == 2.0);
  const auto s = PhysicalField::from_function(d, [](const Point& x) { return 3.0 * std::sin(x[0] + x[1]); });
  CHECK(lp_norm(s, 2.0) == doctest::Approx(oracle::sine_l2(3.0, 2)).epsilon(1e-14));
  // int |sin|^4 = 3/8 of the volume
  CHECK(lp_norm(s, 4.0) == doctest::Approx(3.0 * std::pow(0.375 * vol, 0.25)).epsilon(1e-13));
  CHECK_THROWS_AS(lp_norm(s, 0.5), std::invalid_argument);
}

TEST_CASE("Lp norms are ordered as Hoelder predicts") {
  const Domain d(2, {32, 32});
  const auto u = inverse_transform(random_smooth_field(d, 1.0, 6.0, 21));
  const double vol = d.volume();
  const double ps[] = {1.0, 1.5, 2.0, 4.0, 8.0};
  for (double p : ps) {
    for (double q : ps) {
      if (q > p) continue;
      CHECK(lp_norm(u, q) <= std::pow(vol, 1.0 / q - 1.0 / p) * lp_norm(u, p) * (1 + 1e-13));
    }
    CHECK(lp_norm(u, p) <= std::pow(vol, 1.0 / p) * lp_norm(u, kInfinity) * (1 + 1e-13));
  }
}

TEST_CASE("Parseval: L2 norm from coefficients and grid agree") {
  for (int dim = 1; dim <= 3; ++dim) {
    const Domain d = Domain::cube(dim, dim == 3 ? 8 : 16);
    const auto u = forward_transform(noise(d, 3u * static_cast<unsigned>(dim)));
    SpectralField zero_mean = u;
    zero_mean[0] = 0.0;
    const double from_grid = lp_norm(inverse_transform(zero_mean), 2.0);
    CHECK(hs_seminorm(u, 0.0) == doctest::Approx(from_grid).epsilon(1e-13));
    CHECK(std::sqrt(inner_product(u, u)) == doctest::Approx(lp_norm(inverse_transform(u), 2.0)).epsilon(1e-13));
  }
}

TEST_CASE("Hs seminorm of a single mode") {
  const Domain d(2, {16, 16});
  const auto u = forward_transform(PhysicalField::from_function(d, [](const Point& x) { return std::cos(3 * x[0] + 4 * x[1]); }));
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    CHECK(hs_seminorm(u, s) == doctest::Approx(std::pow(5.0, s) * oracle::sine_l2(1.0, 2)).epsilon(1e-13));
  }
}

TEST_CASE("inner product against a grid sum") {
  const Domain d(2, {16, 16});
  const auto a = noise(d, 1), b = noise(d, 2);
  double grid = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) grid += a[i] * b[i];
  grid *= d.volume() / static_cast<double>(a.size());
  CHECK(inner_product(forward_transform(a), forward_transform(b)) == doctest::Approx(grid).epsilon(1e-13));
}

TEST_CASE("evaluate reproduces the interpolant off the grid") {
  const Domain d(2, {16, 16});
  const auto u = forward_transform(PhysicalField::from_function(d, [](const Point& x) { return std::sin(x[0]) + 0.25 * std::cos(2 * x[0] - 3 * x[1]); }));
  const Point x{0.123, 2.71, 0.0};
  CHECK(evaluate(u, x) == doctest::Approx(std::sin(0.123) + 0.25 * std::cos(0.246 - 8.13)).epsilon(1e-13));
}

TEST_CASE("sup_norm finds the maximum between nodes") {
  const Domain d(1, {8});
  const double shift = 0.3;  // peak of cos(x - shift) sits between nodes
  const auto u = forward_transform(PhysicalField::from_function(d, [&](const Point& x) { return std::cos(x[0] - shift); }));
  const double on_grid = lp_norm(inverse_transform(u), kInfinity);
  CHECK(on_grid < 0.99);
  CHECK(sup_norm(u) == doctest::Approx(1.0).epsilon(1e-13));

  const Domain d2(2, {16, 16});
  const auto v = forward_transform(PhysicalField::from_function(d2, [](const Point& x) { return -2.0 * std::sin(x[0] - 0.1) * std::sin(x[1] + 0.2); }));
  CHECK(sup_norm(v) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sup_norm is never below the grid maximum") {
  const Domain d(2, {32, 32});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto u = random_smooth_field(d, 1.0, 6.0, seed);
    CHECK(sup_norm(u) >= lp_norm(inverse_transform(u), kInfinity));
  }
}

TEST_CASE("zero padding preserves values at coarse nodes") {
  const Domain d(2, {8, 8});
  auto u = random_smooth_field(d, 1.0, 2.0, 8);
  const auto coarse = inverse_transform(u);
  const auto fine = inverse_transform(zero_pad(u, 2));
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK(fine[static_cast<std::size_t>(2 * i * 16 + 2 * j)] == doctest::Approx(coarse[static_cast<std::size_t>(i * 8 + j)]).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(zero_pad(u, 0), std::invalid_argument);
}

TEST_CASE("random fields are reproducible, real, mean-zero and Nyquist-free") {
  const Domain d(2, {32, 32});
  const auto a = random_smooth_field(d, 1.0, 6.0, 42);
  const auto b = random_smooth_field(d, 1.0, 6.0, 42);
  const auto c = random_smooth_field(d, 1.0, 6.0, 43);
  CHECK(max_diff(a, b) == 0.0);
  CHECK(max_diff(a, c) > 0.0);
  CHECK(a.mean() == Complex{});
  CHECK(a.hermitian_defect() == 0.0);
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    const double k2 = norm2(k);
    if (d.is_nyquist(0, k[0]) || d.is_nyquist(1, k[1])) {
      CHECK(a[i] == Complex{});
    } else if (k2 > 0.0) {
      CHECK(std::abs(a[i]) == doctest::Approx(std::exp(-k2 / 36.0) / std::sqrt(k2)).epsilon(1e-12));
    }
  });
  CHECK_THROWS_AS(random_smooth_field(d, 1.0, 0.0, 1), std::invalid_argument);
}

TEST_CASE("normalize_l2") {
  const Domain d(2, {16, 16});
  auto u = random_smooth_field(d, 1.0, 4.0, 2);
  normalize_l2(u, 5.0);
  CHECK(lp_norm(inverse_transform(u), 2.0) == doctest::Approx(5.0).epsilon(1e-13));
  SpectralField z(d);
  normalize_l2(z, 5.0);
  CHECK(z.max_abs() == 0.0);
}
