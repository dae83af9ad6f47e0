#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpm/diagnostics.hpp"
#include "dpm/spectral.hpp"

/// Infinite-energy solutions of the porous-media system in 2D reduced to a
/// periodic problem in one variable. With stream function psi = x2 f(x1, t)
/// the stream slope w = f_x obeys
///
///   w_t = -g'(t) - f w_x + w^2 + g w   [+ regularization],
///   g(t) = (1/pi) int_0^t ||w||^2_{L^2(-pi,pi)},   f(x) = int_{-pi}^x w.
///
/// Regularizations: spectral -/+ nu Lambda^alpha w, or the quasilinear
/// +nu (||f_xx||^2 + g^2) f_xxx. The ansatz w = r(t) cos x closes exactly and
/// leads to the closed-form blow-up below.
namespace dpm::blowup {

enum class Mode { None, Spectral, Quasilinear };

/// Sign of the spectral term. Riccati applies +nu Lambda^alpha, which is
/// what makes r' = r g + nu r hold for the cos ansatz; PdeLiteral applies
/// -nu Lambda^alpha (dissipative) and gives r' = r g - nu r.
enum class SignConvention { Riccati, PdeLiteral };

struct Regularization {
  Mode mode = Mode::None;
  double nu = 0.0;
  double alpha = 2.0;
  SignConvention sign = SignConvention::Riccati;

  void validate() const;
  bool operator==(const Regularization&) const = default;
};

struct StreamSlopeState {
  double t = 0.0;
  PhysicalField w;  // f_x on the 1D torus
  double g = 0.0;   // accumulated (1/pi) int ||w||^2
};

/// f(x) = int_{-pi}^x w: the mean-zero spectral antiderivative shifted so
/// that f(-pi) = 0. Throws std::invalid_argument unless w is mean-zero.
PhysicalField antiderivative(const PhysicalField& w);

struct Tendency {
  PhysicalField dw;
  double dg = 0.0;
};

/// Full right-hand side, regularization included.
Tendency rhs(const StreamSlopeState& state, const Regularization& reg, bool dealias = true);

/// One integrating-factor RK4 step of size h (classical RK4 when there is no
/// linear term). Throws dpm::BlowupError on non-finite values.
StreamSlopeState step(const StreamSlopeState& state, const Regularization& reg, double h, bool dealias = true);

struct RunOptions {
  double dt = 1e-4;         // base step
  bool adaptive = true;     // dt scaled by (1 + |w0|_inf) / (1 + |w|_inf)
  double t_end = 1.0;
  double threshold = 1e8;   // |w|_inf that counts as blow-up
  double sample_every = 0.1;
  bool dealias = true;
};

struct Sample {
  double t = 0.0;
  double l2 = 0.0;    // ||w||_{L^2(-pi,pi)}
  double linf = 0.0;  // max |w| on the grid
  double max = 0.0;   // M(t) = max w on the grid
  double g = 0.0;
  double h2 = 0.0;    // ||w||_{H^2}
  double mean = 0.0;  // mean of w
  double r1 = 0.0;    // amplitude 2|w_1| of the cos x / sin x mode
};

struct Result {
  std::vector<Sample> samples;
  std::optional<StreamSlopeState> final_state;  // last finite state
  bool blowup = false;
  double last_time = 0.0;
  std::optional<double> t_star_estimate;
  std::size_t steps = 0;
  std::string message;
};

Result run(const StreamSlopeState& initial, const Regularization& reg, const RunOptions& options);

Sample measure(const StreamSlopeState& state);

/// Least-squares line through (t, 1/|w|_inf) over the last decade below the
/// threshold; returns the zero crossing. Needs at least three points.
std::optional<double> estimate_blowup_time(std::span<const double> times, std::span<const double> linf,
                                           double threshold);

// ---------------------------------------------------------------------------
// Closed-form solution of the cos ansatz.

struct OracleParams {
  double r0 = 1.0;  // r(0)
  double nu = 0.0;  // >= 0, with r0^2 > nu^2
  SignConvention sign = SignConvention::Riccati;

  void validate() const;
  /// nu for Riccati, -nu for PdeLiteral.
  double signed_nu() const { return sign == SignConvention::Riccati ? nu : -nu; }
};

/// beta(t) = int_0^t r^2 = s tan(s t + atan(nu / s)) - nu,  s = sqrt(r0^2 - nu^2).
/// Throws std::domain_error for t >= blowup_time(params).
double oracle_beta(double t, const OracleParams& params);

/// r(t) = sqrt(beta'(t)) = sqrt(beta^2 + 2 nu beta + r0^2).
double oracle_r(double t, const OracleParams& params);

/// t* = (pi/2 - atan(nu / s)) / s.
double blowup_time(const OracleParams& params);

/// Maximum control M(t) + g(t) <= M0 / (1 - M0 t) for t < 1/M0 (relative
/// slack). Samples at or beyond (1/M0)(1 - slack) are outside the bound's
/// range and pass with an infinite bound.
std::vector<CheckResult> check_max_bound(std::span<const Sample> samples, double m0, double slack);

/// ||w(t)||_2 <= ||w(0)||_2 exp(int_0^t (M + g)), trapezoid in time.
std::vector<CheckResult> check_l2_growth(std::span<const Sample> samples, double slack);

}  // namespace dpm::blowup
