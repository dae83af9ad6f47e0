#include "dpm/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>

namespace dpm::io {
namespace {

constexpr char kMagic[4] = {'D', 'P', 'M', 'F'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw FormatError("snapshot truncated");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const PhysicalField& field, double time, std::optional<double> g) {
  const auto& d = field.domain();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kSnapshotVersion);
  out.push_back(static_cast<std::uint8_t>(d.dim()));
  out.push_back(static_cast<std::uint8_t>(d.buoyancy_axis()));
  for (int n : d.sizes()) put_u64(out, static_cast<std::uint64_t>(n));
  put_f64(out, time);
  for (double v : field.values()) put_f64(out, v);
  if (g) put_f64(out, *g);
  return out;
}

Snapshot decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a DPMF snapshot");
  Reader r(bytes.subspan(4));
  const auto version = r.uint(4);
  if (version != kSnapshotVersion) throw FormatError("unsupported snapshot version " + std::to_string(version));
  const int dim = static_cast<int>(r.uint(1));
  const int axis = static_cast<int>(r.uint(1));
  if (dim < 1 || dim > 3) throw FormatError("bad dimension " + std::to_string(dim));
  std::vector<int> sizes;
  std::size_t count = 1;
  for (int j = 0; j < dim; ++j) {
    const auto n = r.uint(8);
    if (n == 0 || n > (1u << 20)) throw FormatError("bad grid size " + std::to_string(n));
    sizes.push_back(static_cast<int>(n));
    count *= static_cast<std::size_t>(n);
  }
  const double time = r.f64();
  std::optional<Domain> domain;
  try {
    domain.emplace(dim, sizes, axis);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad snapshot header: ") + e.what());
  }
  const std::size_t body = r.remaining();
  if (body != 8 * count && body != 8 * count + 8) throw FormatError("snapshot length does not match its header");
  std::vector<double> values(count);
  for (auto& v : values) v = r.f64();
  Snapshot s{PhysicalField(*domain, std::move(values)), time, std::nullopt};
  if (r.remaining() == 8) s.g = r.f64();
  return s;
}

void write_snapshot(const std::filesystem::path& path, const PhysicalField& field, double time,
                    std::optional<double> g) {
  const auto bytes = encode_snapshot(field, time, g);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records,
                           const DiagnosticsConfig& config) {
  std::vector<std::string> check_names;
  if (!records.empty()) {
    for (const auto& c : records.front().checks) check_names.push_back(c.name);
  }
  out << 't';
  for (double p : config.p_list) out << ",l" << exponent_label(p);
  for (double s : config.s_list) out << ",hs_" << exponent_label(s);
  out << ",dissipation,injection,mean,vmax";
  for (const auto& name : check_names) out << ',' << name << "_bound," << name << "_value," << name << "_pass";
  out << '\n';
  for (const auto& rec : records) {
    if (rec.checks.size() != check_names.size()) throw std::invalid_argument("records carry different checks");
    out << format_double(rec.t);
    for (double p : config.p_list) out << ',' << format_double(rec.norm(p));
    for (double s : config.s_list) out << ',' << format_double(rec.seminorm(s));
    out << ',' << format_double(rec.dissipation) << ',' << format_double(rec.injection) << ','
        << format_double(rec.mean) << ',' << format_double(rec.vmax);
    for (std::size_t i = 0; i < check_names.size(); ++i) {
      const auto& c = rec.checks[i];
      if (c.name != check_names[i]) throw std::invalid_argument("records carry different checks");
      out << ',' << format_double(c.bound) << ',' << format_double(c.value) << ',' << (c.pass ? "pass" : "fail");
    }
    out << '\n';
  }
}

void write_blowup_csv(std::ostream& out, std::span<const blowup::Sample> samples,
                      const std::optional<blowup::OracleParams>& oracle,
                      const std::vector<std::vector<CheckResult>>& checks) {
  for (const auto& series : checks) {
    if (series.size() != samples.size()) throw std::invalid_argument("one check result per sample expected");
  }
  out << "t,l2,linf,max,g,h2,mean,r1";
  if (oracle) out << ",oracle_beta,oracle_r,beta_rel_err";
  for (const auto& series : checks) {
    const std::string name = series.empty() ? "check" : series.front().name;
    out << ',' << name << "_bound," << name << "_value," << name << "_pass";
  }
  out << '\n';
  const double t_star = oracle ? blowup::blowup_time(*oracle) : kInfinity;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    out << format_double(s.t) << ',' << format_double(s.l2) << ',' << format_double(s.linf) << ','
        << format_double(s.max) << ',' << format_double(s.g) << ',' << format_double(s.h2) << ','
        << format_double(s.mean) << ',' << format_double(s.r1);
    if (oracle) {
      if (s.t < t_star) {
        const double beta = blowup::oracle_beta(s.t, *oracle);
        const double err = std::abs(s.g - beta);
        out << ',' << format_double(beta) << ',' << format_double(blowup::oracle_r(s.t, *oracle)) << ','
            << format_double(err == 0.0 ? 0.0 : err / std::abs(beta));
      } else {
        out << ",nan,nan,nan";
      }
    }
    for (const auto& series : checks) {
      const auto& c = series[i];
      out << ',' << format_double(c.bound) << ',' << format_double(c.value) << ',' << (c.pass ? "pass" : "fail");
    }
    out << '\n';
  }
}

}  // namespace dpm::io
