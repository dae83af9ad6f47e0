#include "dpm/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "dpm/io.hpp"
#include "dpm/random_field.hpp"

namespace dpm::app {
namespace fs = std::filesystem;
using config::ConfigError;
using config::FieldKind;

namespace {

fs::path prepare_dir(const std::string& dir) {
  const fs::path path = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(path);
  return path;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double single_mode_value(const config::FieldSpec& spec, const Point& x) {
  double phase = 0.0;
  for (int j = 0; j < 3; ++j) phase += spec.wavevector[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return spec.amplitude * (spec.cosine ? std::cos(phase) : std::sin(phase));
}

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%06zu.dpmf", index);
  return buf;
}

}  // namespace

PhysicalField build_field(const config::FieldSpec& spec, const Domain& domain, double* start_time,
                          std::optional<double>* g) {
  if (start_time) *start_time = 0.0;
  if (g) g->reset();
  std::optional<PhysicalField> field;
  switch (spec.kind) {
    case FieldKind::None:
      field.emplace(domain);
      break;
    case FieldKind::SingleMode:
      field = PhysicalField::from_function(domain, [&](const Point& x) { return single_mode_value(spec, x); });
      break;
    case FieldKind::Random:
      field = inverse_transform(random_smooth_field(domain, spec.r, spec.K, spec.seed));
      break;
    case FieldKind::File: {
      auto snap = io::read_snapshot(spec.path);
      if (!(snap.field.domain() == domain)) {
        throw ConfigError(0, "", "grid of " + spec.path + " does not match the configured domain");
      }
      if (spec.restart) {
        if (start_time) *start_time = snap.time;
        if (g) *g = snap.g;
      }
      field = std::move(snap.field);
      break;
    }
  }
  if (spec.l2_norm) {
    auto u = forward_transform(*field);
    normalize_l2(u, *spec.l2_norm);
    field = inverse_transform(u);
  }
  return std::move(*field);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const io::FormatError*>(&e)) return kConfigError;
  return kError;
}

Outcome run_dpm(const config::RunConfig& cfg, std::ostream& log) {
  const Domain domain = cfg.domain.build();
  double t0 = 0.0;
  const auto initial = build_field(cfg.initial, domain, &t0);
  if (!(cfg.solver.t_end > t0)) throw ConfigError(0, "solver.t_end", "must exceed the start time");
  Forcing forcing;
  if (cfg.forcing.kind != FieldKind::None) forcing.field = forward_transform(build_field(cfg.forcing, domain));

  const fs::path dir = prepare_dir(cfg.output.dir);
  RunOptions options;
  options.sample_every = cfg.diagnostics.sample_every;
  options.diagnostics = cfg.diagnostics.build();
  std::size_t snap_index = 0;
  if (cfg.output.snapshots) {
    options.on_sample = [&](const SimulationState& s, const DiagnosticsRecord&) {
      io::write_snapshot(dir / snapshot_name(snap_index++), inverse_transform(s.temperature), s.t);
    };
  }

  auto result = run(SimulationState{t0, forward_transform(initial)}, cfg.solver, forcing, options);
  if (cfg.diagnostics.checks) {
    attach_standard_checks(result.records, domain, cfg.solver, forcing, options.diagnostics);
  }
  {
    auto out = open_out(dir / cfg.output.csv);
    io::write_diagnostics_csv(out, result.records, options.diagnostics);
  }
  if (!cfg.output.checkpoint.empty() && result.final_state) {
    io::write_snapshot(dir / cfg.output.checkpoint, inverse_transform(result.final_state->temperature),
                       result.final_state->t);
  }

  for (const auto& w : result.warnings) log << "warning: " << w << '\n';
  Outcome outcome;
  std::size_t failed = 0;
  for (const auto& rec : result.records) {
    for (const auto& c : rec.checks) {
      if (!c.pass) {
        if (failed == 0) log << "check " << c.name << " failed at t = " << rec.t << ": " << c.value << " > " << c.bound << '\n';
        ++failed;
      }
    }
  }
  const auto& last = result.records.back();
  log << "steps " << result.steps << ", t = " << last.t << ", ||T||_2 = " << last.l2 << ", failed checks " << failed
      << '\n';
  if (result.blowup) {
    outcome.exit_code = kUnexpectedBlowup;
    outcome.message = result.message;
  } else if (failed > 0) {
    outcome.exit_code = kBoundFailed;
    outcome.message = std::to_string(failed) + " check evaluations failed";
  }
  outcome.metrics = {{"t_final", last.t},
                     {"l2_final", last.l2},
                     {"steps", static_cast<double>(result.steps)},
                     {"failed_checks", static_cast<double>(failed)},
                     {"blowup", result.blowup ? 1.0 : 0.0}};
  return outcome;
}

Outcome run_blowup(const config::RunConfig& cfg, std::ostream& log) {
  const Domain domain = cfg.domain.build();
  if (domain.dim() != 1) throw ConfigError(0, "domain.dim", "blowup1d needs a 1D domain");
  double t0 = 0.0;
  std::optional<double> g0;
  const auto w0 = build_field(cfg.initial, domain, &t0, &g0);
  if (!(cfg.solver.t_end > t0)) throw ConfigError(0, "solver.t_end", "must exceed the start time");
  const auto& reg = cfg.blowup.regularization;

  blowup::RunOptions options;
  options.dt = cfg.solver.dt;
  options.adaptive = cfg.blowup.adaptive;
  options.t_end = cfg.solver.t_end;
  options.threshold = cfg.blowup.threshold;
  options.sample_every = cfg.diagnostics.sample_every;
  options.dealias = cfg.solver.dealias;

  // The cos x ansatz closes for the unregularized and spectral systems.
  std::optional<blowup::OracleParams> oracle;
  const auto& k = cfg.initial.wavevector;
  const bool ansatz = cfg.initial.kind == FieldKind::SingleMode && cfg.initial.cosine && std::abs(k[0]) == 1 &&
                      cfg.initial.amplitude > 0.0 && !cfg.initial.l2_norm && t0 == 0.0;
  if (ansatz && reg.mode != blowup::Mode::Quasilinear) {
    const double nu = reg.mode == blowup::Mode::Spectral ? reg.nu : 0.0;
    if (cfg.initial.amplitude > nu) oracle = blowup::OracleParams{cfg.initial.amplitude, nu, reg.sign};
  }

  blowup::StreamSlopeState initial{t0, w0, g0.value_or(0.0)};
  const auto result = blowup::run(initial, reg, options);

  std::vector<std::vector<CheckResult>> checks;
  const double m0 = result.samples.front().max;
  if (cfg.diagnostics.checks && m0 > 0.0 && reg.mode != blowup::Mode::Spectral) {
    checks.push_back(blowup::check_max_bound(result.samples, m0, cfg.diagnostics.slack));
  }
  if (cfg.diagnostics.checks && reg.mode == blowup::Mode::Quasilinear) {
    checks.push_back(blowup::check_l2_growth(result.samples, 1e-5));
  }

  const fs::path dir = prepare_dir(cfg.output.dir);
  {
    auto out = open_out(dir / cfg.output.csv);
    io::write_blowup_csv(out, result.samples, oracle, checks);
  }
  if (!cfg.output.checkpoint.empty() && result.final_state) {
    io::write_snapshot(dir / cfg.output.checkpoint, result.final_state->w, result.final_state->t,
                       result.final_state->g);
  }

  Outcome outcome;
  double worst_oracle = 0.0;
  double t_star = kInfinity;
  if (oracle) {
    t_star = blowup::blowup_time(*oracle);
    // The sample appended at a blow-up sits next to t*, where beta is too
    // ill-conditioned in t for a relative comparison.
    const std::size_t compared = result.samples.size() - (result.blowup ? 1 : 0);
    for (std::size_t i = 0; i < compared; ++i) {
      const auto& s = result.samples[i];
      if (s.t >= t_star || s.t == 0.0) continue;
      const double beta = blowup::oracle_beta(s.t, *oracle);
      worst_oracle = std::max(worst_oracle, std::abs(s.g - beta) / std::abs(beta));
    }
  }
  const double t_est = result.t_star_estimate.value_or(std::nan(""));

  bool expect_blowup = false;
  switch (cfg.blowup.expect) {
    case config::Expectation::Auto:
      expect_blowup = oracle && t_star <= cfg.solver.t_end;
      break;
    case config::Expectation::Blowup:
      expect_blowup = true;
      break;
    case config::Expectation::Global:
      expect_blowup = false;
      break;
  }

  std::vector<std::string> failures;
  if (oracle && worst_oracle > cfg.blowup.oracle_tol) {
    failures.push_back("g deviates from the closed form by " + io::format_double(worst_oracle));
  }
  if (expect_blowup && !result.blowup) failures.push_back("expected blow-up did not occur");
  if (expect_blowup && result.blowup && oracle && t_star <= cfg.solver.t_end) {
    const double rel = std::abs(t_est - t_star) / t_star;
    if (!(rel <= cfg.blowup.t_star_tol)) {
      failures.push_back("blow-up time estimate " + io::format_double(t_est) + " vs " + io::format_double(t_star));
    }
  }
  for (const auto& series : checks) {
    for (const auto& c : series) {
      if (!c.pass) {
        failures.push_back(c.name + " failed: " + io::format_double(c.value) + " > " + io::format_double(c.bound));
        break;
      }
    }
  }

  {
    auto out = open_out(dir / "summary.csv");
    out << "t_end_reached,blowup,t_star_est,t_star_oracle,max_beta_rel_err,steps\n";
    out << io::format_double(result.last_time) << ',' << (result.blowup ? 1 : 0) << ',' << io::format_double(t_est)
        << ',' << io::format_double(oracle ? t_star : std::nan("")) << ','
        << io::format_double(oracle ? worst_oracle : std::nan("")) << ',' << result.steps << '\n';
  }

  log << "steps " << result.steps << ", last t = " << result.last_time;
  if (result.blowup) log << ", blow-up (" << result.message << "), estimated t* = " << t_est;
  if (oracle) log << ", closed-form t* = " << t_star << ", max |g - beta|/beta = " << worst_oracle;
  log << '\n';
  for (const auto& f : failures) log << "fail: " << f << '\n';

  if (result.blowup && !expect_blowup) {
    outcome.exit_code = kUnexpectedBlowup;
    outcome.message = result.message;
  } else if (!failures.empty()) {
    outcome.exit_code = kBoundFailed;
    outcome.message = failures.front();
  }
  outcome.metrics = {{"t_end_reached", result.last_time},
                     {"blowup", result.blowup ? 1.0 : 0.0},
                     {"t_star_est", t_est},
                     {"t_star_oracle", oracle ? t_star : std::nan("")},
                     {"max_beta_rel_err", oracle ? worst_oracle : std::nan("")},
                     {"steps", static_cast<double>(result.steps)}};
  return outcome;
}

Outcome run_sweep(const config::RunConfig& cfg, std::ostream& log) {
  if (cfg.sweep.empty()) throw ConfigError(0, "sweep", "no sweep.<key> lists given");

  // Expand the Cartesian product, last key varying fastest.
  std::vector<std::vector<std::pair<std::string, std::string>>> points{{}};
  for (const auto& [key, values] : cfg.sweep) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& p : points) {
      for (const auto& v : values) {
        auto q = p;
        q.emplace_back(key, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }

  config::RunConfig base = cfg;
  base.sweep.clear();
  const fs::path dir = prepare_dir(cfg.output.dir);
  std::vector<config::RunConfig> configs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto overrides = points[i];
    overrides.emplace_back("output.dir", (dir / ("point_" + std::to_string(i))).string());
    configs.push_back(config::with_overrides(base, overrides));
  }

  std::vector<Outcome> outcomes(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream point_log;
      try {
        outcomes[i] = cfg.sweep_command == "blowup1d" ? run_blowup(configs[i], point_log) : run_dpm(configs[i], point_log);
      } catch (const std::exception& e) {
        outcomes[i].exit_code = exit_code_for(e);
        outcomes[i].message = e.what();
        point_log << "error: " << e.what() << '\n';
      }
      fs::create_directories(configs[i].output.dir);
      std::ofstream(fs::path(configs[i].output.dir) / "log.txt") << point_log.str();
    }
  };
  unsigned threads = cfg.sweep_threads > 0 ? static_cast<unsigned>(cfg.sweep_threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  Outcome outcome;
  auto out = open_out(dir / "summary.csv");
  out << "point";
  for (const auto& [key, values] : cfg.sweep) out << ',' << key;
  out << ",exit_code";
  std::vector<std::string> metric_names;
  for (const auto& o : outcomes) {
    if (!o.metrics.empty()) {
      for (const auto& [name, value] : o.metrics) metric_names.push_back(name);
      break;
    }
  }
  for (const auto& name : metric_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << i;
    for (const auto& [key, value] : points[i]) out << ',' << value;
    out << ',' << outcomes[i].exit_code;
    for (std::size_t m = 0; m < metric_names.size(); ++m) {
      out << ',' << (m < outcomes[i].metrics.size() ? io::format_double(outcomes[i].metrics[m].second) : "");
    }
    out << '\n';
    log << "point " << i << ": exit " << outcomes[i].exit_code;
    if (!outcomes[i].message.empty()) log << " (" << outcomes[i].message << ")";
    log << '\n';
    outcome.exit_code = std::max(outcome.exit_code, outcomes[i].exit_code);
  }
  outcome.metrics = {{"points", static_cast<double>(points.size())}};
  return outcome;
}

}  // namespace dpm::app
