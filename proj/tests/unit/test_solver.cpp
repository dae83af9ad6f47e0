#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpm/random_field.hpp"
#include "dpm/solver.hpp"
#include "dpm/velocity.hpp"

using namespace dpm;

namespace {

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SpectralField field(const Domain& d, const std::function<double(const Point&)>& fn) {
  return forward_transform(PhysicalField::from_function(d, fn));
}

SolverParams params(double nu, double alpha, double dt, double t_end) {
  SolverParams p;
  p.nu = nu;
  p.alpha = alpha;
  p.dt = dt;
  p.t_end = t_end;
  return p;
}

}  // namespace

TEST_CASE("solver parameters are validated") {
  CHECK_NOTHROW(params(0.0, 0.0, 1e-3, 1.0).validate());
  CHECK_THROWS_AS(params(-1.0, 1.0, 1e-3, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params(0.1, 2.5, 1e-3, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params(0.1, 1.0, 0.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params(0.1, 1.0, 1e-3, 0.0).validate(), std::invalid_argument);
  auto p = params(0.1, 1.0, 1e-3, 1.0);
  p.cfl_safety = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.cfl_safety = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("single modes are steady solutions of the transport part") {
  const Domain d(2, {16, 16});
  CHECK(nonlinear_term(field(d, [](const Point& x) { return std::sin(3 * x[0]); })).max_abs() < 1e-15);
  CHECK(nonlinear_term(field(d, [](const Point& x) { return std::cos(2 * x[1]); })).max_abs() < 1e-15);
  CHECK(nonlinear_term(field(d, [](const Point& x) { return std::cos(x[0] - 2 * x[1]); })).max_abs() < 1e-15);
}

TEST_CASE("nonlinear term of a two-mode field against its closed form") {
  // T = cos(x+y) + sin x gives v = (cos(x+y)/2, -cos(x+y)/2 - sin x) and
  // v.grad T = cos(x+y) cos x / 2 + sin x sin(x+y).
  const Domain d(2, {32, 32});
  const auto t = field(d, [](const Point& x) { return std::cos(x[0] + x[1]) + std::sin(x[0]); });
  const auto expected = field(d, [](const Point& x) {
    return -(0.5 * std::cos(x[0] + x[1]) * std::cos(x[0]) + std::sin(x[0]) * std::sin(x[0] + x[1]));
  });
  CHECK(max_diff(nonlinear_term(t, true), expected) < 1e-15);
  CHECK(max_diff(nonlinear_term(t, false), expected) < 1e-15);
}

TEST_CASE("transport conserves mean and energy of resolved data") {
  for (int dim = 2; dim <= 3; ++dim) {
    // sizes not divisible by 3, so aliases of the truncated products land beyond the cutoff
    const Domain d = Domain::cube(dim, dim == 2 ? 64 : 16);
    auto t = dealias(random_smooth_field(d, 1.0, 6.0, 77));
    t[0] = 0.4;
    const auto n = nonlinear_term(t);
    CHECK(std::abs(n.mean()) < 1e-15);
    CHECK(std::abs(inner_product(t, n)) < 1e-13 * hs_seminorm(t, 0.0) * hs_seminorm(n, 0.0));
  }
}

TEST_CASE("pure diffusion of a steady mode is exact") {
  const Domain d(2, {16, 16});
  const double nu = 0.3, alpha = 1.5;
  for (Scheme scheme : {Scheme::IFRK4, Scheme::IFEuler}) {
    auto p = params(nu, alpha, 0.1, 1.0);
    p.scheme = scheme;
    const auto t0 = field(d, [](const Point& x) { return std::sin(x[0] + x[1]); });
    const auto res = run(SimulationState{0.0, t0}, p, Forcing{}, RunOptions{});
    REQUIRE(res.final_state);
    CHECK(res.final_state->t == 1.0);
    CHECK(max_diff(res.final_state->temperature, std::exp(-nu * std::pow(2.0, 0.75)) * t0) < 1e-15);
    CHECK(res.steps == 10);
  }
}

TEST_CASE("steady forcing relaxes toward f / (nu |k|^alpha)") {
  const Domain d(2, {16, 16});
  const double nu = 0.5;
  const auto f = field(d, [](const Point& x) { return std::sin(x[1]); });
  auto p = params(nu, 2.0, 1e-2, 2.0);
  const auto res = run(SimulationState{0.0, SpectralField(d)}, p, Forcing{f}, RunOptions{});
  const auto expected = ((1.0 - std::exp(-nu * 2.0)) / nu) * f;
  CHECK(max_diff(res.final_state->temperature, expected) < 1e-10);
}

TEST_CASE("IFRK4 converges at fourth order") {
  const Domain d(2, {32, 32});
  auto t0 = random_smooth_field(d, 1.0, 4.0, 5);
  normalize_l2(t0, 3.0);
  auto solve = [&](double dt) {
    return run(SimulationState{0.0, t0}, params(0.05, 1.0, dt, 0.4), Forcing{}, RunOptions{}).final_state->temperature;
  };
  const auto ref = solve(0.4 / 256);
  const double e1 = max_diff(solve(0.4 / 16), ref);
  const double e2 = max_diff(solve(0.4 / 32), ref);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("IFEuler converges at first order") {
  const Domain d(2, {32, 32});
  auto t0 = random_smooth_field(d, 1.0, 4.0, 5);
  normalize_l2(t0, 3.0);
  auto solve = [&](double dt, Scheme s) {
    auto p = params(0.05, 1.0, dt, 0.4);
    p.scheme = s;
    return run(SimulationState{0.0, t0}, p, Forcing{}, RunOptions{}).final_state->temperature;
  };
  const auto ref = solve(0.4 / 256, Scheme::IFRK4);
  const double ratio = max_diff(solve(0.4 / 64, Scheme::IFEuler), ref) / max_diff(solve(0.4 / 128, Scheme::IFEuler), ref);
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);
}

TEST_CASE("mean is pinned to its exact evolution") {
  const Domain d(2, {16, 16});
  auto t0 = random_smooth_field(d, 1.0, 4.0, 8);
  t0[0] = 0.25;
  SpectralField f(d);
  f[0] = 0.1;
  f.set_mode({1, 1, 0}, 0.2);
  const auto res = run(SimulationState{0.0, t0}, params(0.1, 1.0, 1e-2, 1.0), Forcing{f}, RunOptions{});
  CHECK(res.final_state->temperature.mean() == Complex(0.35, 0.0));
  SimulationState s{2.0, t0};
  enforce_mean(s, Forcing{f}, 1.0, 1.0);
  CHECK(s.temperature.mean().real() == doctest::Approx(1.1));
}

TEST_CASE("samples fall on multiples of sample_every and at t_end") {
  const Domain d(1, {16});
  const auto t0 = field(d, [](const Point& x) { return std::sin(x[0]); });
  RunOptions o;
  o.sample_every = 0.25;
  const auto res = run(SimulationState{0.1, t0}, params(0.1, 2.0, 0.1, 1.1), Forcing{}, o);
  std::vector<double> times;
  for (const auto& r : res.records) times.push_back(r.t);
  const std::vector<double> expected{0.1, 0.25, 0.5, 0.75, 1.0, 1.1};
  REQUIRE(times.size() == expected.size());
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(times[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  CHECK(res.states.size() == res.records.size());
  // 0.15 -> 2 substeps, 0.25 -> 3 each, 0.1 -> 1
  CHECK(res.steps == 2 + 3 + 3 + 3 + 1);

  o.keep_states = false;
  std::size_t calls = 0;
  o.on_sample = [&](const SimulationState&, const DiagnosticsRecord&) { ++calls; };
  const auto res2 = run(SimulationState{0.1, t0}, params(0.1, 2.0, 0.1, 1.1), Forcing{}, o);
  CHECK(res2.states.empty());
  CHECK(calls == expected.size());
}

TEST_CASE("restarting from a sample reproduces the trajectory") {
  const Domain d(2, {32, 32});
  auto t0 = random_smooth_field(d, 1.0, 6.0, 12);
  normalize_l2(t0, 2.0);
  RunOptions o;
  o.sample_every = 0.1;
  const auto full = run(SimulationState{0.0, t0}, params(0.02, 1.5, 1e-2, 0.6), Forcing{}, o);
  const auto& mid = full.states[3];
  CHECK(mid.t == doctest::Approx(0.3));
  const auto rest = run(mid, params(0.02, 1.5, 1e-2, 0.6), Forcing{}, o);
  CHECK(max_diff(rest.final_state->temperature, full.final_state->temperature) <= 1e-12);
}

TEST_CASE("CFL-limited stepping") {
  const Domain d(2, {32, 32});
  auto t0 = random_smooth_field(d, 1.0, 4.0, 2);
  normalize_l2(t0, 20.0);
  auto p = params(0.05, 1.0, 1.0, 0.5);
  p.cfl_safety = 0.5;
  const DpmStepper stepper(p, Forcing{});
  const double h = stepper.cfl_dt(SimulationState{0.0, t0});
  const double vmax = velocity_sup_norm(velocity_from_temperature(t0));
  CHECK(h == doctest::Approx(0.5 * d.min_spacing() / vmax));
  const auto res = run(SimulationState{0.0, t0}, p, Forcing{}, RunOptions{});
  CHECK(res.final_state->t == 0.5);
  CHECK(res.steps >= static_cast<std::size_t>(0.5 / h));
  CHECK_FALSE(res.blowup);
}

TEST_CASE("non-finite data ends the run as a blow-up") {
  const Domain d(1, {16});
  SpectralField t0(d);
  t0.set_mode({1, 0, 0}, std::numeric_limits<double>::infinity());
  const DpmStepper stepper(params(0.1, 1.0, 0.1, 1.0), Forcing{});
  CHECK_THROWS_AS(stepper.step(SimulationState{0.0, t0}, 0.1), BlowupError);
  const auto res = run(SimulationState{0.0, t0}, params(0.1, 1.0, 0.1, 1.0), Forcing{}, RunOptions{});
  CHECK(res.blowup);
  CHECK_FALSE(res.message.empty());
  CHECK(res.records.back().blowup);
}

TEST_CASE("warnings for supercritical order and unresolved data") {
  const Domain d(1, {16});
  SpectralField t0(d);
  t0.set_mode({8, 0, 0}, 1.0);
  t0.set_mode({1, 0, 0}, 1.0);
  auto p = params(0.1, 0.5, 0.1, 0.1);
  const auto res = run(SimulationState{0.0, t0}, p, Forcing{}, RunOptions{});
  CHECK(res.warnings.size() == 2);
}

TEST_CASE("standard checks on an unforced run") {
  const Domain d(2, {32, 32});
  auto t0 = random_smooth_field(d, 1.0, 6.0, 3);
  normalize_l2(t0, 1.0);
  RunOptions o;
  o.sample_every = 2e-3;
  const auto p = params(0.1, 1.0, 2e-3, 0.1);
  auto res = run(SimulationState{0.0, t0}, p, Forcing{}, o);
  attach_standard_checks(res.records, d, p, Forcing{}, o.diagnostics);
  const auto& last = res.records.back();
  for (const char* name : {"mp_l2", "mp_l4", "mp_linf", "decay", "budget"}) {
    CAPTURE(name);
    REQUIRE(last.check(name) != nullptr);
  }
  CHECK(last.check("ball") == nullptr);
  CHECK(all_checks_pass(res.records));
}

TEST_CASE("standard checks on a forced run") {
  const Domain d(2, {32, 32});
  const auto f = field(d, [](const Point& x) { return std::sin(x[0]) * std::cos(2 * x[1]); });
  RunOptions o;
  o.sample_every = 5e-3;
  const auto p = params(0.2, 2.0, 5e-3, 0.5);
  auto res = run(SimulationState{0.0, SpectralField(d)}, p, Forcing{f}, o);
  attach_standard_checks(res.records, d, p, Forcing{f}, o.diagnostics);
  CHECK(res.records.back().check("ball") != nullptr);
  CHECK(res.records.back().check("mp_l2") == nullptr);
  CHECK(all_checks_pass(res.records));
}
