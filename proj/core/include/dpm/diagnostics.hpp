#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpm/spectral.hpp"

namespace dpm {

struct DiagnosticsConfig {
  /// Exponents of the L^p norms recorded per sample (kInfinity allowed).
  std::vector<double> p_list{1.0, 2.0, 4.0, kInfinity};
  /// Orders s of the recorded seminorms ||Lambda^s T||_{L^2}.
  std::vector<double> s_list{};
  /// Relative slack shared by every analytic inequality.
  double slack = 1e-6;
  /// Constant c of the algebraic L^inf decay; the check is off when unset.
  std::optional<double> linf_algebraic_c;
  /// Order s of the small-data energy ||T||_2^2 + ||Lambda^s T||_2^2; off when unset.
  std::optional<double> small_data_s;
};

struct CheckResult {
  std::string name;
  double bound = 0.0;
  double value = 0.0;
  bool pass = true;
};

struct DiagnosticsRecord {
  double t = 0.0;
  std::vector<std::pair<double, double>> lp;  // (p, ||T||_p)
  std::vector<std::pair<double, double>> hs;  // (s, ||Lambda^s T||_2)
  double l2 = 0.0;
  double dissipation = 0.0;  // nu ||Lambda^(alpha/2) T||_2^2
  double injection = 0.0;    // integral f T dx
  double mean = 0.0;         // T(0) coefficient
  double vmax = 0.0;         // ||v||_inf
  std::vector<CheckResult> checks;
  bool blowup = false;

  /// Recorded ||T||_p; throws std::out_of_range if p was not configured.
  double norm(double p) const;
  double seminorm(double s) const;
  const CheckResult* check(const std::string& name) const;
};

/// Norms, dissipation and forcing power of one state.
DiagnosticsRecord measure(double t, const SpectralField& temperature, double nu, double alpha,
                          const SpectralField* forcing, const DiagnosticsConfig& config);

/// Parameters shared by the analytic bounds.
struct BoundContext {
  double nu = 0.0;
  double alpha = 2.0;
  double lambda1 = 1.0;
  double volume = 1.0;  // |T^N| = (2pi)^N
  double slack = 1e-6;
};

/// Exponential decay on the torus for unforced mean-zero data:
///   ||T(t)||_q <= |T^N|^(1/q - 1/p) ||T0||_p exp(-2 nu lambda1^alpha (t - t0) / p),  q <= p.
/// The volume factor is Hoelder's inequality and equals 1 for q = p. Time is
/// measured from the first record, whose norms supply T0. Throws
/// std::logic_error for forced runs, where the bound does not apply.
std::vector<CheckResult> check_decay_torus(std::span<const DiagnosticsRecord> records, const BoundContext& ctx,
                                           double p, double q, bool forced);

/// Absorbing ball in L^p for forced runs:
///   ||T(t)||_p <= (||T0||_p - R) exp(-nu lambda1^alpha t / p) + R,  R = p ||f||_p / (nu lambda1^alpha).
std::vector<CheckResult> check_absorbing_ball(std::span<const DiagnosticsRecord> records, const BoundContext& ctx,
                                              double p, double forcing_norm_p);

/// Energy budget between consecutive samples (trapezoid in time):
///   ||T(t_i)||^2 + 2 int D <= ||T(t_{i-1})||^2 + 2 int (f, T).
/// The first record has no predecessor and passes trivially.
std::vector<CheckResult> check_dissipation_budget(std::span<const DiagnosticsRecord> records, double slack);

/// Signed budget residuals (LHS - RHS) / max(1, ||T(t_{i-1})||^2), one per
/// consecutive pair.
std::vector<double> budget_residuals(std::span<const DiagnosticsRecord> records);

/// Maximum principle: ||T(t_k)||_p <= ||T(t_{k-1})||_p within the slack.
std::vector<CheckResult> check_lp_monotone(std::span<const DiagnosticsRecord> records, double p, double slack);

/// ||T(t)||_inf <= ||T0||_inf (1 + alpha c t ||T0||_inf^alpha)^(-1/alpha).
std::vector<CheckResult> check_linf_algebraic(std::span<const DiagnosticsRecord> records, double alpha, double c,
                                              double slack);

/// ||T||_2^2 + ||Lambda^s T||_2^2 non-increasing between samples.
std::vector<CheckResult> check_small_data(std::span<const DiagnosticsRecord> records, double s, double slack);

/// Appends results[i] to records[i].checks.
void attach_checks(std::span<DiagnosticsRecord> records, const std::vector<CheckResult>& results);

bool all_checks_pass(std::span<const DiagnosticsRecord> records);

/// Name used in CSV columns for an exponent: "1", "2", "4", "inf", "1.5".
std::string exponent_label(double p);

}  // namespace dpm
