#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpm/diagnostics.hpp"
#include "dpm/spectral.hpp"

namespace dpm {

namespace detail {
class Advection;
}

enum class Scheme { IFRK4, IFEuler };

struct SolverParams {
  double nu = 0.0;     // diffusion coefficient
  double alpha = 2.0;  // fractional order in [0, 2]
  double dt = 1e-3;    // fixed step, or the cap on adaptive steps
  double t_end = 1.0;
  Scheme scheme = Scheme::IFRK4;
  bool dealias = true;
  /// When set, steps follow the advective CFL bound (capped by dt).
  std::optional<double> cfl_safety;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  bool operator==(const SolverParams&) const = default;
};

/// Time-independent source term; empty means f = 0.
struct Forcing {
  std::optional<SpectralField> field;

  bool active() const { return field.has_value(); }
  double mean() const { return field ? field->mean().real() : 0.0; }
};

struct SimulationState {
  double t = 0.0;
  SpectralField temperature;
};

/// A coefficient became non-finite. Carries the time of the failed step.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(double t, const std::string& what) : std::runtime_error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

/// -div(v T) in spectral form, with v the Darcy velocity of T. The products
/// v_j T are formed on the grid and truncated by the 2/3 rule when `dealias`.
SpectralField nonlinear_term(const SpectralField& temperature, bool dealias = true);

/// Integrating-factor stepper for dT/dt = -div(vT) - nu Lambda^alpha T + f.
/// The linear term is propagated exactly by exp(-nu |k|^alpha h). Holds a
/// cache of propagators, so one instance serves one simulation at a time.
class DpmStepper {
 public:
  DpmStepper(SolverParams params, Forcing forcing);

  /// Advances by h. Throws BlowupError if any coefficient turns non-finite.
  SimulationState step(const SimulationState& state, double h) const;

  /// cfl_safety * dx / max(||v||_inf, 1e-8), dx = 2pi / max n_j.
  double cfl_dt(const SimulationState& state) const;

  const SolverParams& params() const { return params_; }
  const Forcing& forcing() const { return forcing_; }

 private:
  SpectralField rhs(const SpectralField& u) const;
  void update_propagators(const Domain& domain, double h) const;

  SolverParams params_;
  Forcing forcing_;
  mutable std::shared_ptr<detail::Advection> advection_;
  mutable double cached_h_ = -1.0;
  mutable std::vector<double> full_;  // exp(L h)
  mutable std::vector<double> half_;  // exp(L h / 2)
};

/// Pins the mean coefficient to its exact evolution m(t) = m0 + (t - t0) f(0).
void enforce_mean(SimulationState& state, const Forcing& forcing, double mean0, double t0);

struct RunOptions {
  /// Samples are taken on the grid k * sample_every and at t_end; <= 0
  /// samples only the endpoints.
  double sample_every = 0.0;
  DiagnosticsConfig diagnostics;
  bool keep_states = true;
  /// Called after every sample (including the initial one).
  std::function<void(const SimulationState&, const DiagnosticsRecord&)> on_sample;
};

struct RunResult {
  std::vector<SimulationState> states;  // one per record when keep_states
  std::vector<DiagnosticsRecord> records;
  std::optional<SimulationState> final_state;  // last finite state
  bool blowup = false;
  std::string message;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

/// Integrates from `initial` (at its own time) to params.t_end. A blow-up
/// ends the run early with `blowup` set and the last finite state kept.
RunResult run(const SimulationState& initial, const SolverParams& params, const Forcing& forcing,
              const RunOptions& options);

RunResult run(const PhysicalField& initial, const SolverParams& params, const Forcing& forcing,
              const RunOptions& options);

/// Attaches the checks that apply to a trajectory: maximum principle for
/// every recorded p >= 2 and torus decay (unforced), absorbing ball
/// (forced, mean-zero), dissipation budget (always), plus the optional
/// algebraic L^inf and small-data checks.
void attach_standard_checks(std::vector<DiagnosticsRecord>& records, const Domain& domain,
                            const SolverParams& params, const Forcing& forcing, const DiagnosticsConfig& config);

}  // namespace dpm
