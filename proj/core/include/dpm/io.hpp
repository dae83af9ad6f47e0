#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpm/blowup1d.hpp"
#include "dpm/diagnostics.hpp"
#include "dpm/spectral.hpp"

namespace dpm::io {

/// Snapshot layout, little-endian throughout:
///   "DPMF" | u32 version | u8 dim | u8 buoyancy_axis | u64 n per axis |
///   f64 time | f64 values (row-major) | [f64 g, checkpoints of the 1D module]
inline constexpr std::uint32_t kSnapshotVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  PhysicalField field;
  double time = 0.0;
  std::optional<double> g;
};

std::vector<std::uint8_t> encode_snapshot(const PhysicalField& field, double time, std::optional<double> g = {});
/// Throws FormatError on a bad magic, version, header or length.
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

void write_snapshot(const std::filesystem::path& path, const PhysicalField& field, double time,
                    std::optional<double> g = {});
Snapshot read_snapshot(const std::filesystem::path& path);

/// 17 significant digits, "inf"/"nan" for non-finite values.
std::string format_double(double value);

/// Header plus one row per record. Check columns follow the order of the
/// first record's checks; every record must carry the same checks.
void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records,
                           const DiagnosticsConfig& config);

/// Per-sample trajectory of the stream-slope problem. With an oracle the
/// closed-form columns are added; `checks` holds one series per check.
void write_blowup_csv(std::ostream& out, std::span<const blowup::Sample> samples,
                      const std::optional<blowup::OracleParams>& oracle,
                      const std::vector<std::vector<CheckResult>>& checks);

}  // namespace dpm::io
