#include "dpm/blowup1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dpm/solver.hpp"

namespace dpm::blowup {
namespace {

constexpr double kPi = std::numbers::pi;

// Half-spectrum weight: k = 0 and Nyquist appear once, the rest twice.
double weight(std::size_t i, int n) { return i == 0 || 2 * i == static_cast<std::size_t>(n) ? 1.0 : 2.0; }

// ||w||^2 on (-pi, pi), mean included.
double l2_squared(const SpectralField& w) {
  const int n = w.domain().size(0);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += weight(i, n) * std::norm(w[i]);
  return 2.0 * kPi * sum;
}

// ||w_x||^2 on (-pi, pi).
double slope_squared(const SpectralField& w) {
  const auto& d = w.domain();
  double sum = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double k = d.odd_wavenumber(0, static_cast<int>(i));
    sum += weight(i, d.size(0)) * k * k * std::norm(w[i]);
  }
  return 2.0 * kPi * sum;
}

SpectralField antiderivative_spectral(const SpectralField& w) {
  const auto& d = w.domain();
  SpectralField f(d);
  double shift = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const int k = d.odd_wavenumber(0, static_cast<int>(i));
    if (k == 0) continue;
    f[i] = w[i] / Complex(0.0, static_cast<double>(k));
    // conjugate pairs contribute 2 Re(f_k) (-1)^k
    shift += 2.0 * f[i].real() * (k % 2 == 0 ? 1.0 : -1.0);
  }
  f[0] = Complex(-shift, 0.0);
  return f;
}

void require_1d(const Domain& d) {
  if (d.dim() != 1) throw std::invalid_argument("the stream-slope problem lives on the 1D torus");
}

void require_mean_zero(const SpectralField& w) {
  const double scale = std::max(1.0, w.max_abs());
  if (std::abs(w.mean()) > 1e-10 * scale) throw std::invalid_argument("w must be mean-zero");
}

struct SpecState {
  double t = 0.0;
  SpectralField w;
  double g = 0.0;
};

struct Increment {
  SpectralField dw;
  double dg = 0.0;
};

class Integrator {
 public:
  Integrator(const Regularization& reg, bool dealias) : reg_(reg), dealias_(dealias) {}

  double coefficient(const SpectralField& w, double g) const {
    return reg_.nu * (slope_squared(w) + g * g);
  }

  // Everything except the linear part that the integrating factor absorbs.
  // `frozen` is the quasilinear coefficient used in that linear part.
  Increment explicit_part(const SpectralField& w, double g, double frozen) const {
    const auto& d = w.domain();
    const auto wp = inverse_transform(w);
    const auto wx = inverse_transform(partial_derivative(w, 0));
    const auto f = inverse_transform(antiderivative_spectral(w));
    PhysicalField prod(d);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = wp[i] * wp[i] - f[i] * wx[i];
    Increment out{forward_transform(prod), l2_squared(w) / kPi};
    if (dealias_) dealias_in_place(out.dw);
    out.dw.axpy(g, w);
    out.dw[0] -= out.dg;
    if (reg_.mode == Mode::Quasilinear) {
      const double excess = coefficient(w, g) - frozen;
      for (std::size_t i = 1; i < w.size(); ++i) {
        const double k = static_cast<double>(i);
        out.dw[i] -= excess * k * k * w[i];
      }
    }
    return out;
  }

  // Diagonal linear rate L_k (growth when positive).
  std::vector<double> rates(const Domain& d, double frozen) const {
    std::vector<double> r(d.spectral_size(), 0.0);
    for (std::size_t i = 1; i < r.size(); ++i) {
      const double k = static_cast<double>(i);
      if (reg_.mode == Mode::Spectral) {
        const double s = reg_.sign == SignConvention::Riccati ? 1.0 : -1.0;
        r[i] = s * reg_.nu * std::pow(k, reg_.alpha);
      } else if (reg_.mode == Mode::Quasilinear) {
        r[i] = -frozen * k * k;
      }
    }
    return r;
  }

  SpecState step(const SpecState& s, double h) const {
    const auto& d = s.w.domain();
    const double frozen = reg_.mode == Mode::Quasilinear ? coefficient(s.w, s.g) : 0.0;
    const auto rate = rates(d, frozen);
    const std::size_t m = s.w.size();
    std::vector<double> full(m), half(m);
    for (std::size_t i = 0; i < m; ++i) {
      full[i] = std::exp(rate[i] * h);
      half[i] = std::exp(0.5 * rate[i] * h);
    }
    const auto& u = s.w;
    SpectralField stage(d);

    const auto a = explicit_part(u, s.g, frozen);
    for (std::size_t i = 0; i < m; ++i) stage[i] = half[i] * (u[i] + 0.5 * h * a.dw[i]);
    const auto b = explicit_part(stage, s.g + 0.5 * h * a.dg, frozen);
    for (std::size_t i = 0; i < m; ++i) stage[i] = half[i] * u[i] + 0.5 * h * b.dw[i];
    const auto c = explicit_part(stage, s.g + 0.5 * h * b.dg, frozen);
    for (std::size_t i = 0; i < m; ++i) stage[i] = full[i] * u[i] + h * half[i] * c.dw[i];
    const auto e = explicit_part(stage, s.g + h * c.dg, frozen);

    SpecState next{s.t + h, SpectralField(d), s.g + h / 6.0 * (a.dg + 2.0 * (b.dg + c.dg) + e.dg)};
    for (std::size_t i = 0; i < m; ++i) {
      next.w[i] = full[i] * u[i] + h / 6.0 * (full[i] * a.dw[i] + 2.0 * half[i] * (b.dw[i] + c.dw[i]) + e.dw[i]);
    }
    if (!next.w.all_finite() || !std::isfinite(next.g)) {
      std::ostringstream msg;
      msg << "non-finite stream slope after step to t = " << next.t;
      throw BlowupError(next.t, msg.str());
    }
    return next;
  }

 private:
  Regularization reg_;
  bool dealias_;
};

SpecState to_spectral(const StreamSlopeState& s) {
  require_1d(s.w.domain());
  return SpecState{s.t, forward_transform(s.w), s.g};
}

StreamSlopeState to_physical(const SpecState& s) { return StreamSlopeState{s.t, inverse_transform(s.w), s.g}; }

Sample measure_spectral(const SpecState& s) {
  Sample out;
  out.t = s.t;
  out.g = s.g;
  out.l2 = std::sqrt(l2_squared(s.w));
  const auto wp = inverse_transform(s.w);
  out.max = -kInfinity;
  for (double v : wp.values()) {
    out.linf = std::max(out.linf, std::abs(v));
    out.max = std::max(out.max, v);
  }
  const int n = s.w.domain().size(0);
  double h2 = 0.0;
  for (std::size_t i = 0; i < s.w.size(); ++i) {
    const double k2 = static_cast<double>(i * i);
    h2 += weight(i, n) * (1.0 + k2) * (1.0 + k2) * std::norm(s.w[i]);
  }
  out.h2 = std::sqrt(2.0 * kPi * h2);
  out.mean = s.w.mean().real();
  out.r1 = s.w.size() > 1 ? 2.0 * std::abs(s.w[1]) : 0.0;
  return out;
}

}  // namespace

void Regularization::validate() const {
  if (!(nu >= 0.0)) throw std::invalid_argument("regularization nu must be >= 0");
  if (mode == Mode::Spectral && !(alpha >= 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("regularization alpha must lie in [0, 2]");
  }
}

PhysicalField antiderivative(const PhysicalField& w) {
  require_1d(w.domain());
  const auto wh = forward_transform(w);
  require_mean_zero(wh);
  return inverse_transform(antiderivative_spectral(wh));
}

Tendency rhs(const StreamSlopeState& state, const Regularization& reg, bool dealias) {
  reg.validate();
  const auto s = to_spectral(state);
  const Integrator integ(reg, dealias);
  const double frozen = reg.mode == Mode::Quasilinear ? integ.coefficient(s.w, s.g) : 0.0;
  auto inc = integ.explicit_part(s.w, s.g, frozen);
  const auto rate = integ.rates(s.w.domain(), frozen);
  for (std::size_t i = 0; i < s.w.size(); ++i) inc.dw[i] += rate[i] * s.w[i];
  return Tendency{inverse_transform(inc.dw), inc.dg};
}

StreamSlopeState step(const StreamSlopeState& state, const Regularization& reg, double h, bool dealias) {
  reg.validate();
  if (!(h > 0.0)) throw std::invalid_argument("step size must be > 0");
  return to_physical(Integrator(reg, dealias).step(to_spectral(state), h));
}

Sample measure(const StreamSlopeState& state) { return measure_spectral(to_spectral(state)); }

std::optional<double> estimate_blowup_time(std::span<const double> times, std::span<const double> linf,
                                           double threshold) {
  if (times.size() != linf.size()) throw std::invalid_argument("times and norms differ in length");
  std::size_t end = times.size();
  while (end > 0 && !(std::isfinite(linf[end - 1]) && linf[end - 1] <= threshold)) --end;
  std::size_t begin = end;
  while (begin > 0 && std::isfinite(linf[begin - 1]) && linf[begin - 1] >= 0.1 * threshold) --begin;
  // Too few points in the last decade: fall back to the trailing history.
  if (end - begin < 3) begin = end >= 8 ? end - 8 : 0;
  if (end - begin < 3) return std::nullopt;
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double t0 = times[begin];
  const double count = static_cast<double>(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double t = times[i] - t0;
    const double y = 1.0 / linf[i];
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = count * stt - st * st;
  if (denom == 0.0) return std::nullopt;
  const double slope = (count * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / count;
  if (!(slope < 0.0)) return std::nullopt;
  return t0 - intercept / slope;
}

Result run(const StreamSlopeState& initial, const Regularization& reg, const RunOptions& options) {
  reg.validate();
  if (!(options.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(options.t_end > initial.t)) throw std::invalid_argument("t_end must exceed the initial time");
  if (!(options.threshold > 0.0)) throw std::invalid_argument("blow-up threshold must be > 0");

  SpecState s = to_spectral(initial);
  require_mean_zero(s.w);
  if (options.dealias) dealias_in_place(s.w);
  const Integrator integ(reg, options.dealias);

  Result result;
  Sample current = measure_spectral(s);
  result.samples.push_back(current);
  const double linf0 = current.linf;
  std::vector<double> times{s.t}, norms{current.linf};

  const double eps = 1e-12 * std::max(1.0, options.t_end);
  auto next_sample_time = [&](double t) {
    if (options.sample_every <= 0.0) return options.t_end;
    const double k = std::floor(t / options.sample_every + 1e-9) + 1.0;
    return std::min(k * options.sample_every, options.t_end);
  };

  double target = next_sample_time(s.t);
  try {
    while (s.t < options.t_end - eps) {
      double h = options.adaptive ? options.dt * (1.0 + linf0) / (1.0 + current.linf) : options.dt;
      const bool lands = target - s.t - h <= eps;
      if (lands) h = target - s.t;
      auto next = integ.step(s, h);
      if (lands) next.t = target;
      ++result.steps;
      const auto probe = measure_spectral(next);
      times.push_back(next.t);
      norms.push_back(probe.linf);
      if (!std::isfinite(probe.linf) || probe.linf > options.threshold) {
        std::ostringstream msg;
        msg << "|w|_inf = " << probe.linf << " exceeded the threshold " << options.threshold << " at t = " << next.t;
        throw BlowupError(next.t, msg.str());
      }
      s = std::move(next);
      current = probe;
      if (lands) {
        result.samples.push_back(current);
        target = next_sample_time(s.t);
      }
    }
  } catch (const BlowupError& e) {
    result.blowup = true;
    result.message = e.what();
    result.last_time = e.time();
    if (times.back() < e.time()) {
      times.push_back(e.time());
      norms.push_back(kInfinity);
    }
    result.t_star_estimate = estimate_blowup_time(times, norms, options.threshold);
    if (result.samples.back().t != s.t) result.samples.push_back(current);
  }
  if (!result.blowup) result.last_time = s.t;
  result.final_state = to_physical(s);
  return result;
}

double blowup_time(const OracleParams& params);

void OracleParams::validate() const {
  if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be > 0");
  if (!(nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
  if (!(r0 * r0 > nu * nu)) throw std::invalid_argument("the closed form needs r0^2 > nu^2");
}

double oracle_beta(double t, const OracleParams& params) {
  if (!(t < blowup_time(params))) throw std::domain_error("oracle evaluated at or beyond the blow-up time");
  const double nu = params.signed_nu();
  const double s = std::sqrt(params.r0 * params.r0 - nu * nu);
  return s * std::tan(s * t + std::atan(nu / s)) - nu;
}

double oracle_r(double t, const OracleParams& params) {
  const double beta = oracle_beta(t, params);
  const double nu = params.signed_nu();
  return std::sqrt(beta * beta + 2.0 * nu * beta + params.r0 * params.r0);
}

double blowup_time(const OracleParams& params) {
  params.validate();
  const double nu = params.signed_nu();
  const double s = std::sqrt(params.r0 * params.r0 - nu * nu);
  return (0.5 * kPi - std::atan(nu / s)) / s;
}

std::vector<CheckResult> check_max_bound(std::span<const Sample> samples, double m0, double slack) {
  if (!(m0 > 0.0)) throw std::invalid_argument("the maximum bound needs M0 > 0");
  std::vector<CheckResult> out;
  if (samples.empty()) return out;
  const double t0 = samples.front().t;
  const double horizon = (1.0 / m0) * (1.0 - slack);
  for (const auto& s : samples) {
    const double t = s.t - t0;
    const double value = s.max + s.g;
    if (t >= horizon) {
      out.push_back(CheckResult{"max_bound", kInfinity, value, true});
      continue;
    }
    const double bound = m0 / (1.0 - m0 * t);
    out.push_back(CheckResult{"max_bound", bound, value, value <= bound * (1.0 + slack)});
  }
  return out;
}

std::vector<CheckResult> check_l2_growth(std::span<const Sample> samples, double slack) {
  std::vector<CheckResult> out;
  if (samples.empty()) return out;
  double integral = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0) {
      const auto& a = samples[i - 1];
      const auto& b = samples[i];
      integral += 0.5 * (b.t - a.t) * (a.max + a.g + b.max + b.g);
    }
    const double bound = samples.front().l2 * std::exp(integral);
    out.push_back(CheckResult{"l2_growth", bound, samples[i].l2, samples[i].l2 <= bound * (1.0 + slack)});
  }
  return out;
}

}  // namespace dpm::blowup
