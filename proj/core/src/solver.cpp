#include "dpm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpm/velocity.hpp"
#include "fft.hpp"

namespace dpm {

void SolverParams::validate() const {
  if (!(nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in [0, 2]");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (cfl_safety && !(*cfl_safety > 0.0 && *cfl_safety <= 1.0)) {
    throw std::invalid_argument("cfl safety factor must lie in (0, 1]");
  }
}

namespace detail {

// -div(vT) with the per-mode multipliers and work arrays kept between calls.
class Advection {
 public:
  Advection(const Domain& d, bool dealias) : domain_(d), scale_(1.0 / static_cast<double>(d.physical_size())) {
    const std::size_t m = d.spectral_size();
    const auto dims = static_cast<std::size_t>(d.dim());
    velocity_.assign(dims, std::vector<double>(m));
    kappa_.assign(dims, std::vector<double>(m));
    keep_.assign(m, 1);
    const int buoy = d.buoyancy_axis();
    d.for_each_mode([&](std::size_t i, const Wavevector& k) {
      Wavevector q{0, 0, 0};
      for (int j = 0; j < d.dim(); ++j) {
        q[j] = d.odd_wavenumber(j, k[j]);
        if (dealias && 3 * std::abs(k[j]) > d.size(j)) keep_[i] = 0;
      }
      const double q2 = norm2(q);
      for (int j = 0; j < d.dim(); ++j) {
        double mult = j == buoy ? -1.0 : 0.0;
        if (q2 != 0.0) mult += static_cast<double>(q[j]) * q[buoy] / q2;
        velocity_[static_cast<std::size_t>(j)][i] = mult;
        kappa_[static_cast<std::size_t>(j)][i] = q[j];
      }
    });
    work_.resize(m);
    flux_.resize(m);
    t_.resize(d.physical_size());
    v_.resize(d.physical_size());
  }

  const Domain& domain() const { return domain_; }

  void apply(const SpectralField& temperature, SpectralField& out) {
    const auto t = temperature.coeffs();
    const std::size_t m = t.size();
    std::copy(t.begin(), t.end(), work_.begin());
    c2r(domain_, work_.data(), t_.data());
    auto o = out.coeffs();
    std::fill(o.begin(), o.end(), Complex{});
    for (std::size_t j = 0; j < velocity_.size(); ++j) {
      const auto& mult = velocity_[j];
      for (std::size_t i = 0; i < m; ++i) work_[i] = mult[i] * t[i];
      c2r(domain_, work_.data(), v_.data());
      for (std::size_t i = 0; i < v_.size(); ++i) v_[i] *= t_[i];
      r2c(domain_, v_.data(), flux_.data());
      const auto& kap = kappa_[j];
      for (std::size_t i = 0; i < m; ++i) {
        if (keep_[i]) o[i] -= Complex(0.0, kap[i] * scale_) * flux_[i];
      }
    }
  }

 private:
  Domain domain_;
  double scale_;
  std::vector<std::vector<double>> velocity_;
  std::vector<std::vector<double>> kappa_;
  std::vector<unsigned char> keep_;
  std::vector<Complex> work_, flux_;
  std::vector<double> t_, v_;
};

}  // namespace detail

SpectralField nonlinear_term(const SpectralField& temperature, bool dealias) {
  detail::Advection op(temperature.domain(), dealias);
  SpectralField out(temperature.domain());
  op.apply(temperature, out);
  return out;
}

DpmStepper::DpmStepper(SolverParams params, Forcing forcing)
    : params_(std::move(params)), forcing_(std::move(forcing)) {
  params_.validate();
}

void DpmStepper::update_propagators(const Domain& domain, double h) const {
  if (h == cached_h_ && full_.size() == domain.spectral_size()) return;
  full_.resize(domain.spectral_size());
  half_.resize(domain.spectral_size());
  domain.for_each_mode([&](std::size_t i, const Wavevector& k) {
    const double k2 = norm2(k);
    const double rate = k2 == 0.0 ? 0.0 : params_.nu * std::pow(k2, 0.5 * params_.alpha);
    full_[i] = std::exp(-rate * h);
    half_[i] = std::exp(-0.5 * rate * h);
  });
  cached_h_ = h;
}

SpectralField DpmStepper::rhs(const SpectralField& u) const {
  if (!advection_ || !(advection_->domain() == u.domain())) {
    advection_ = std::make_shared<detail::Advection>(u.domain(), params_.dealias);
  }
  SpectralField n(u.domain());
  advection_->apply(u, n);
  if (forcing_.field) n += *forcing_.field;
  return n;
}

SimulationState DpmStepper::step(const SimulationState& state, double h) const {
  const auto& d = state.temperature.domain();
  update_propagators(d, h);
  const auto& u = state.temperature;
  const std::size_t m = u.size();
  SimulationState next{state.t + h, SpectralField(d)};
  auto out = next.temperature.coeffs();

  if (params_.scheme == Scheme::IFEuler) {
    const auto a = rhs(u);
    for (std::size_t i = 0; i < m; ++i) out[i] = full_[i] * (u[i] + h * a[i]);
  } else {
    const auto a = rhs(u);
    SpectralField stage(d);
    for (std::size_t i = 0; i < m; ++i) stage[i] = half_[i] * (u[i] + 0.5 * h * a[i]);
    const auto b = rhs(stage);
    for (std::size_t i = 0; i < m; ++i) stage[i] = half_[i] * u[i] + 0.5 * h * b[i];
    const auto c = rhs(stage);
    for (std::size_t i = 0; i < m; ++i) stage[i] = full_[i] * u[i] + h * half_[i] * c[i];
    const auto e = rhs(stage);
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = full_[i] * u[i] + h / 6.0 * (full_[i] * a[i] + 2.0 * half_[i] * (b[i] + c[i]) + e[i]);
    }
  }
  if (!next.temperature.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite spectral coefficient after step to t = " << next.t;
    throw BlowupError(next.t, msg.str());
  }
  return next;
}

double DpmStepper::cfl_dt(const SimulationState& state) const {
  const double safety = params_.cfl_safety.value_or(1.0);
  const double vmax = velocity_sup_norm(velocity_from_temperature(state.temperature));
  return safety * state.temperature.domain().min_spacing() / std::max(vmax, 1e-8);
}

void enforce_mean(SimulationState& state, const Forcing& forcing, double mean0, double t0) {
  state.temperature[0] = Complex(mean0 + (state.t - t0) * forcing.mean(), 0.0);
}

namespace {

// Largest coefficient beyond the 2/3 cutoff relative to the largest overall.
double unresolved_fraction(const SpectralField& u) {
  const auto& d = u.domain();
  double tail = 0.0;
  d.for_each_mode([&](std::size_t i, const Wavevector& k) {
    for (int axis = 0; axis < d.dim(); ++axis) {
      if (3 * std::abs(k[axis]) > d.size(axis)) {
        tail = std::max(tail, std::abs(u[i]));
        return;
      }
    }
  });
  const double peak = u.max_abs();
  return peak > 0.0 ? tail / peak : 0.0;
}

}  // namespace

RunResult run(const SimulationState& initial, const SolverParams& params, const Forcing& forcing,
              const RunOptions& options) {
  params.validate();
  RunResult result;
  if (params.alpha < 1.0) {
    result.warnings.push_back("supercritical alpha < 1: only local or small-data theory applies");
  }
  if (unresolved_fraction(initial.temperature) > 1e-10) {
    result.warnings.push_back("initial data not resolved: spectral tail above 1e-10 of the peak");
  }

  SimulationState state = initial;
  Forcing f = forcing;
  if (params.dealias) {
    dealias_in_place(state.temperature);
    if (f.field) dealias_in_place(*f.field);
  }
  const DpmStepper stepper(params, f);
  const double t0 = state.t;
  const double mean0 = state.temperature.mean().real();
  enforce_mean(state, f, mean0, t0);

  auto record = [&](const SimulationState& s) {
    auto rec = measure(s.t, s.temperature, params.nu, params.alpha, f.field ? &*f.field : nullptr,
                       options.diagnostics);
    if (options.keep_states) result.states.push_back(s);
    result.records.push_back(rec);
    if (options.on_sample) options.on_sample(s, result.records.back());
  };
  record(state);

  const double eps = 1e-12 * std::max(1.0, params.t_end);
  auto next_sample_time = [&](double t) {
    if (options.sample_every <= 0.0) return params.t_end;
    const double k = std::floor(t / options.sample_every + 1e-9) + 1.0;
    return std::min(k * options.sample_every, params.t_end);
  };

  try {
    while (state.t < params.t_end - eps) {
      const double target = next_sample_time(state.t);
      const double start = state.t;
      if (!params.cfl_safety) {
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil((target - start) / params.dt - 1e-9)));
        const double h = (target - start) / static_cast<double>(m);
        for (std::size_t i = 1; i <= m; ++i) {
          state = stepper.step(state, h);
          state.t = i == m ? target : start + static_cast<double>(i) * h;
          enforce_mean(state, f, mean0, t0);
          ++result.steps;
        }
      } else {
        while (state.t < target - eps) {
          double h = std::min({params.dt, stepper.cfl_dt(state), target - state.t});
          const bool last = target - state.t - h <= eps;
          state = stepper.step(state, h);
          if (last) state.t = target;
          enforce_mean(state, f, mean0, t0);
          ++result.steps;
        }
      }
      result.final_state = state;
      record(state);
    }
  } catch (const BlowupError& e) {
    result.blowup = true;
    result.message = e.what();
    if (result.records.empty() || result.records.back().t != state.t) record(state);
    result.records.back().blowup = true;
  }
  result.final_state = state;
  return result;
}

RunResult run(const PhysicalField& initial, const SolverParams& params, const Forcing& forcing,
              const RunOptions& options) {
  return run(SimulationState{0.0, forward_transform(initial)}, params, forcing, options);
}

void attach_standard_checks(std::vector<DiagnosticsRecord>& records, const Domain& domain,
                            const SolverParams& params, const Forcing& forcing, const DiagnosticsConfig& config) {
  if (records.empty()) return;
  const BoundContext ctx{params.nu, params.alpha, domain.lambda1(), domain.volume(), config.slack};
  const auto& first = records.front();
  const double scale = std::max(1.0, first.l2);
  const bool mean_zero = std::abs(first.mean) <= 1e-12 * scale && std::abs(forcing.mean()) <= 1e-12 * scale;

  if (!forcing.active()) {
    for (double p : config.p_list) {
      if (p >= 2.0) attach_checks(records, check_lp_monotone(records, p, config.slack));
    }
    if (mean_zero) attach_checks(records, check_decay_torus(records, ctx, 2.0, 2.0, false));
    if (config.linf_algebraic_c && params.alpha > 0.0) {
      attach_checks(records, check_linf_algebraic(records, params.alpha, *config.linf_algebraic_c, config.slack));
    }
  } else if (mean_zero && params.nu > 0.0) {
    const double fnorm = hs_seminorm(*forcing.field, 0.0);
    attach_checks(records, check_absorbing_ball(records, ctx, 2.0, fnorm));
  }
  attach_checks(records, check_dissipation_budget(records, config.slack));
  if (config.small_data_s) attach_checks(records, check_small_data(records, *config.small_data_s, config.slack));
}

}  // namespace dpm
