#include "dpm/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "dpm/velocity.hpp"

namespace dpm {
namespace {

bool within(double value, double bound, double slack) {
  return value <= bound + slack * std::abs(bound) + std::numeric_limits<double>::min();
}

CheckResult make(std::string name, double bound, double value, double slack) {
  return CheckResult{std::move(name), bound, value, within(value, bound, slack)};
}

}  // namespace

std::string exponent_label(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), p);
  return std::string(buf, res.ptr);
}

double DiagnosticsRecord::norm(double p) const {
  for (const auto& [q, value] : lp) {
    if (q == p) return value;
  }
  if (p == 2.0) return l2;
  throw std::out_of_range("L^" + exponent_label(p) + " norm was not recorded");
}

double DiagnosticsRecord::seminorm(double s) const {
  for (const auto& [q, value] : hs) {
    if (q == s) return value;
  }
  throw std::out_of_range("H^" + exponent_label(s) + " seminorm was not recorded");
}

const CheckResult* DiagnosticsRecord::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

DiagnosticsRecord measure(double t, const SpectralField& temperature, double nu, double alpha,
                          const SpectralField* forcing, const DiagnosticsConfig& config) {
  DiagnosticsRecord rec;
  rec.t = t;
  const auto phys = inverse_transform(temperature);
  for (double p : config.p_list) rec.lp.emplace_back(p, std::isinf(p) ? sup_norm(temperature) : lp_norm(phys, p));
  for (double s : config.s_list) rec.hs.emplace_back(s, hs_seminorm(temperature, s));
  rec.l2 = lp_norm(phys, 2.0);
  const double h = hs_seminorm(temperature, 0.5 * alpha);
  rec.dissipation = nu * h * h;
  rec.injection = forcing != nullptr ? inner_product(*forcing, temperature) : 0.0;
  rec.mean = temperature.mean().real();
  rec.vmax = velocity_sup_norm(velocity_from_temperature(temperature));
  return rec;
}

std::vector<CheckResult> check_decay_torus(std::span<const DiagnosticsRecord> records, const BoundContext& ctx,
                                           double p, double q, bool forced) {
  if (forced) throw std::logic_error("the torus decay bound only applies to unforced runs");
  if (q > p) throw std::invalid_argument("decay check needs q <= p");
  std::vector<CheckResult> out;
  if (records.empty()) return out;
  const double t0 = records.front().t;
  const double initial = records.front().norm(p);
  const double rate = std::isinf(p) ? 0.0 : 2.0 * ctx.nu * std::pow(ctx.lambda1, ctx.alpha) / p;
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double volume_factor = std::pow(ctx.volume, inv_q - inv_p);
  for (const auto& rec : records) {
    const double bound = volume_factor * initial * std::exp(-rate * (rec.t - t0));
    out.push_back(make("decay", bound, rec.norm(q), ctx.slack));
  }
  return out;
}

std::vector<CheckResult> check_absorbing_ball(std::span<const DiagnosticsRecord> records, const BoundContext& ctx,
                                              double p, double forcing_norm_p) {
  std::vector<CheckResult> out;
  if (records.empty()) return out;
  const double t0 = records.front().t;
  const double initial = records.front().norm(p);
  const double rate = ctx.nu * std::pow(ctx.lambda1, ctx.alpha);
  const double radius = p * forcing_norm_p / rate;
  for (const auto& rec : records) {
    const double bound = (initial - radius) * std::exp(-rate * (rec.t - t0) / p) + radius;
    out.push_back(make("ball", bound, rec.norm(p), ctx.slack));
  }
  return out;
}

std::vector<double> budget_residuals(std::span<const DiagnosticsRecord> records) {
  std::vector<double> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    const double h = b.t - a.t;
    const double lhs = b.l2 * b.l2 + h * (a.dissipation + b.dissipation);
    const double rhs = a.l2 * a.l2 + h * (a.injection + b.injection);
    out.push_back((lhs - rhs) / std::max(1.0, a.l2 * a.l2));
  }
  return out;
}

std::vector<CheckResult> check_dissipation_budget(std::span<const DiagnosticsRecord> records, double slack) {
  std::vector<CheckResult> out;
  if (records.empty()) return out;
  const double e0 = records.front().l2 * records.front().l2;
  out.push_back(CheckResult{"budget", e0, e0, true});
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    const double h = b.t - a.t;
    const double lhs = b.l2 * b.l2 + h * (a.dissipation + b.dissipation);
    const double rhs = a.l2 * a.l2 + h * (a.injection + b.injection);
    const double scale = std::max(1.0, a.l2 * a.l2);
    out.push_back(CheckResult{"budget", rhs, lhs, lhs - rhs <= slack * scale});
  }
  return out;
}

std::vector<CheckResult> check_lp_monotone(std::span<const DiagnosticsRecord> records, double p, double slack) {
  std::vector<CheckResult> out;
  const std::string name = "mp_l" + exponent_label(p);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double value = records[i].norm(p);
    const double bound = i == 0 ? value : records[i - 1].norm(p);
    out.push_back(make(name, bound, value, slack));
  }
  return out;
}

std::vector<CheckResult> check_linf_algebraic(std::span<const DiagnosticsRecord> records, double alpha, double c,
                                              double slack) {
  std::vector<CheckResult> out;
  if (records.empty()) return out;
  if (!(alpha > 0.0)) throw std::invalid_argument("algebraic L^inf decay needs alpha > 0");
  const double t0 = records.front().t;
  const double m0 = records.front().norm(kInfinity);
  for (const auto& rec : records) {
    const double bound = m0 * std::pow(1.0 + alpha * c * (rec.t - t0) * std::pow(m0, alpha), -1.0 / alpha);
    out.push_back(make("linf_algebraic", bound, rec.norm(kInfinity), slack));
  }
  return out;
}

std::vector<CheckResult> check_small_data(std::span<const DiagnosticsRecord> records, double s, double slack) {
  std::vector<CheckResult> out;
  auto energy = [s](const DiagnosticsRecord& r) {
    const double h = r.seminorm(s);
    return r.l2 * r.l2 + h * h;
  };
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double value = energy(records[i]);
    const double bound = i == 0 ? value : energy(records[i - 1]);
    out.push_back(make("small_data", bound, value, slack));
  }
  return out;
}

void attach_checks(std::span<DiagnosticsRecord> records, const std::vector<CheckResult>& results) {
  if (results.size() != records.size()) throw std::invalid_argument("one check result per record expected");
  for (std::size_t i = 0; i < records.size(); ++i) records[i].checks.push_back(results[i]);
}

bool all_checks_pass(std::span<const DiagnosticsRecord> records) {
  return std::all_of(records.begin(), records.end(), [](const DiagnosticsRecord& r) {
    return std::all_of(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return c.pass; });
  });
}

}  // namespace dpm
