#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpm/blowup1d.hpp"
#include "dpm/diagnostics.hpp"
#include "dpm/solver.hpp"

/// Run configuration: flat `key = value` text with dotted section names.
///
///   # comment
///   domain.dim = 2
///   domain.n = 64            # one value, or one per axis
///   solver.nu = 0.01
///   initial.kind = single_mode
///   initial.wavevector = 1, 0
///
/// Unknown keys, repeated keys and malformed values are errors that name
/// the offending line and key.
namespace dpm::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message);
  int line() const { return line_; }  // 0 when not tied to a line
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Splits text into entries; only syntax is checked here.
std::vector<Entry> tokenize(std::istream& in);

struct DomainSpec {
  int dim = 2;
  std::vector<int> n{64, 64};
  int buoyancy_axis = -1;  // -1: last axis

  Domain build() const;
  bool operator==(const DomainSpec&) const = default;
};

enum class FieldKind { None, SingleMode, Random, File };

struct FieldSpec {
  FieldKind kind = FieldKind::None;
  Wavevector wavevector{1, 0, 0};
  double amplitude = 1.0;
  bool cosine = false;  // sin by default
  double r = 1.0;       // random spectrum slope
  double K = 6.0;       // random spectrum cutoff
  std::uint64_t seed = 1;
  std::optional<double> l2_norm;
  std::string path;
  bool restart = false;  // file data carries the start time (and g)

  bool operator==(const FieldSpec&) const = default;
};

struct DiagnosticsSpec {
  std::vector<double> p{1.0, 2.0, 4.0, kInfinity};
  std::vector<double> s{};
  double sample_every = 0.1;
  bool checks = true;
  double slack = 1e-6;
  std::optional<double> linf_c;
  std::optional<double> small_data_s;

  DiagnosticsConfig build() const;
  bool operator==(const DiagnosticsSpec&) const = default;
};

struct OutputSpec {
  std::string dir = "out";
  std::string csv = "diagnostics.csv";
  bool snapshots = false;  // one snapshot per sample
  std::string checkpoint;  // final state file name, empty for none

  bool operator==(const OutputSpec&) const = default;
};

/// Whether the 1D run is meant to blow up. Auto defers to the closed form
/// when the initial data is a cos x mode, and expects a global solution
/// otherwise.
enum class Expectation { Auto, Blowup, Global };

struct BlowupSpec {
  blowup::Regularization regularization;
  Expectation expect = Expectation::Auto;
  double threshold = 1e8;
  bool adaptive = true;
  double oracle_tol = 1e-6;  // relative error of g against beta
  double t_star_tol = 0.01;  // relative error of the blow-up time estimate

  bool operator==(const BlowupSpec&) const = default;
};

inline FieldSpec single_mode_field() {
  FieldSpec f;
  f.kind = FieldKind::SingleMode;
  return f;
}

struct RunConfig {
  DomainSpec domain;
  SolverParams solver;
  FieldSpec initial = single_mode_field();
  FieldSpec forcing;
  DiagnosticsSpec diagnostics;
  OutputSpec output;
  BlowupSpec blowup;
  std::string sweep_command = "run";
  int sweep_threads = 0;  // 0: hardware concurrency
  /// Swept keys in file order, each with its list of values.
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse(std::istream& in);
RunConfig parse_string(const std::string& text);
RunConfig parse_file(const std::filesystem::path& path);

/// Every field as text; parse(serialize(c)) == c.
std::string serialize(const RunConfig& config);

/// Re-parses the configuration with `key = value` replaced or added.
RunConfig with_overrides(const RunConfig& config, const std::vector<std::pair<std::string, std::string>>& overrides);

/// Lossless shortest decimal form; "inf" for infinity.
std::string format_number(double value);

}  // namespace dpm::config
