#include "dpm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace dpm::config {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.push_back(trim(std::string_view(value).substr(start, comma == std::string::npos ? comma : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const Entry& e, const std::string& message) { throw ConfigError(e.line, e.key, message); }

double to_double(const Entry& e, const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || std::isnan(value)) {
    fail(e, "expected a number, got '" + text + "'");
  }
  return value;
}

long long to_integer(const Entry& e, const std::string& text) {
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(e, "expected an integer, got '" + text + "'");
  }
  return value;
}

int to_int(const Entry& e, const std::string& text) {
  const long long v = to_integer(e, text);
  if (v < -1000000000LL || v > 1000000000LL) fail(e, "integer out of range: " + text);
  return static_cast<int>(v);
}

bool to_bool(const Entry& e) {
  const auto& v = e.value;
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  fail(e, "expected true or false, got '" + v + "'");
}

std::vector<double> to_doubles(const Entry& e) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_double(e, item));
  return out;
}

std::vector<int> to_ints(const Entry& e) {
  std::vector<int> out;
  for (const auto& item : split_list(e.value)) out.push_back(to_int(e, item));
  return out;
}

template <class Enum>
Enum to_enum(const Entry& e, std::initializer_list<std::pair<const char*, Enum>> names) {
  std::string allowed;
  for (const auto& [name, value] : names) {
    if (e.value == name) return value;
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  fail(e, "expected one of " + allowed + ", got '" + e.value + "'");
}

const std::initializer_list<std::pair<const char*, FieldKind>> kFieldKinds{
    {"none", FieldKind::None}, {"single_mode", FieldKind::SingleMode}, {"random", FieldKind::Random},
    {"file", FieldKind::File}};
const std::initializer_list<std::pair<const char*, Scheme>> kSchemes{{"ifrk4", Scheme::IFRK4},
                                                                     {"ifeuler", Scheme::IFEuler}};
const std::initializer_list<std::pair<const char*, blowup::Mode>> kModes{
    {"none", blowup::Mode::None}, {"spectral", blowup::Mode::Spectral}, {"quasilinear", blowup::Mode::Quasilinear}};
const std::initializer_list<std::pair<const char*, Expectation>> kExpectations{
    {"auto", Expectation::Auto}, {"blowup", Expectation::Blowup}, {"global", Expectation::Global}};
const std::initializer_list<std::pair<const char*, blowup::SignConvention>> kSigns{
    {"riccati", blowup::SignConvention::Riccati}, {"pde_literal", blowup::SignConvention::PdeLiteral}};

template <class Enum>
std::string enum_name(Enum value, std::initializer_list<std::pair<const char*, Enum>> names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

using Setter = std::function<void(RunConfig&, const Entry&)>;

void add_field_keys(std::map<std::string, Setter>& keys, const std::string& prefix, FieldSpec RunConfig::*field) {
  keys[prefix + ".kind"] = [field](RunConfig& c, const Entry& e) { (c.*field).kind = to_enum(e, kFieldKinds); };
  keys[prefix + ".wavevector"] = [field](RunConfig& c, const Entry& e) {
    const auto k = to_ints(e);
    if (k.empty() || k.size() > 3) fail(e, "expected 1 to 3 integer components");
    Wavevector w{0, 0, 0};
    std::copy(k.begin(), k.end(), w.begin());
    (c.*field).wavevector = w;
  };
  keys[prefix + ".amplitude"] = [field](RunConfig& c, const Entry& e) { (c.*field).amplitude = to_double(e, e.value); };
  keys[prefix + ".shape"] = [field](RunConfig& c, const Entry& e) {
    (c.*field).cosine = to_enum<bool>(e, {{"sin", false}, {"cos", true}});
  };
  keys[prefix + ".r"] = [field](RunConfig& c, const Entry& e) { (c.*field).r = to_double(e, e.value); };
  keys[prefix + ".K"] = [field](RunConfig& c, const Entry& e) {
    (c.*field).K = to_double(e, e.value);
    if (!((c.*field).K > 0.0)) fail(e, "must be > 0");
  };
  keys[prefix + ".seed"] = [field](RunConfig& c, const Entry& e) {
    const long long v = to_integer(e, e.value);
    if (v < 0) fail(e, "must be >= 0");
    (c.*field).seed = static_cast<std::uint64_t>(v);
  };
  keys[prefix + ".l2_norm"] = [field](RunConfig& c, const Entry& e) {
    const double v = to_double(e, e.value);
    if (!(v >= 0.0) || std::isinf(v)) fail(e, "must be finite and >= 0");
    (c.*field).l2_norm = v;
  };
  keys[prefix + ".path"] = [field](RunConfig& c, const Entry& e) { (c.*field).path = e.value; };
  keys[prefix + ".restart"] = [field](RunConfig& c, const Entry& e) { (c.*field).restart = to_bool(e); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> k;
    k["domain.dim"] = [](RunConfig& c, const Entry& e) { c.domain.dim = to_int(e, e.value); };
    k["domain.n"] = [](RunConfig& c, const Entry& e) {
      c.domain.n = to_ints(e);
      if (c.domain.n.empty()) fail(e, "expected at least one size");
    };
    k["domain.buoyancy_axis"] = [](RunConfig& c, const Entry& e) { c.domain.buoyancy_axis = to_int(e, e.value); };

    k["solver.nu"] = [](RunConfig& c, const Entry& e) { c.solver.nu = to_double(e, e.value); };
    k["solver.alpha"] = [](RunConfig& c, const Entry& e) { c.solver.alpha = to_double(e, e.value); };
    k["solver.dt"] = [](RunConfig& c, const Entry& e) { c.solver.dt = to_double(e, e.value); };
    k["solver.t_end"] = [](RunConfig& c, const Entry& e) { c.solver.t_end = to_double(e, e.value); };
    k["solver.scheme"] = [](RunConfig& c, const Entry& e) { c.solver.scheme = to_enum(e, kSchemes); };
    k["solver.dealias"] = [](RunConfig& c, const Entry& e) { c.solver.dealias = to_bool(e); };
    k["solver.cfl"] = [](RunConfig& c, const Entry& e) { c.solver.cfl_safety = to_double(e, e.value); };

    add_field_keys(k, "initial", &RunConfig::initial);
    add_field_keys(k, "forcing", &RunConfig::forcing);

    k["diagnostics.p"] = [](RunConfig& c, const Entry& e) {
      c.diagnostics.p = to_doubles(e);
      for (double p : c.diagnostics.p) {
        if (!(p >= 1.0)) fail(e, "exponents must be >= 1");
      }
    };
    k["diagnostics.s"] = [](RunConfig& c, const Entry& e) { c.diagnostics.s = to_doubles(e); };
    k["diagnostics.sample_every"] = [](RunConfig& c, const Entry& e) {
      c.diagnostics.sample_every = to_double(e, e.value);
      if (!(c.diagnostics.sample_every >= 0.0)) fail(e, "must be >= 0");
    };
    k["diagnostics.checks"] = [](RunConfig& c, const Entry& e) { c.diagnostics.checks = to_bool(e); };
    k["diagnostics.slack"] = [](RunConfig& c, const Entry& e) {
      c.diagnostics.slack = to_double(e, e.value);
      if (!(c.diagnostics.slack >= 0.0)) fail(e, "must be >= 0");
    };
    k["diagnostics.linf_c"] = [](RunConfig& c, const Entry& e) { c.diagnostics.linf_c = to_double(e, e.value); };
    k["diagnostics.small_data_s"] = [](RunConfig& c, const Entry& e) {
      c.diagnostics.small_data_s = to_double(e, e.value);
    };

    k["output.dir"] = [](RunConfig& c, const Entry& e) { c.output.dir = e.value; };
    k["output.csv"] = [](RunConfig& c, const Entry& e) {
      if (e.value.empty()) fail(e, "must not be empty");
      c.output.csv = e.value;
    };
    k["output.snapshots"] = [](RunConfig& c, const Entry& e) { c.output.snapshots = to_bool(e); };
    k["output.checkpoint"] = [](RunConfig& c, const Entry& e) { c.output.checkpoint = e.value; };

    k["blowup.mode"] = [](RunConfig& c, const Entry& e) { c.blowup.regularization.mode = to_enum(e, kModes); };
    k["blowup.nu"] = [](RunConfig& c, const Entry& e) { c.blowup.regularization.nu = to_double(e, e.value); };
    k["blowup.alpha"] = [](RunConfig& c, const Entry& e) { c.blowup.regularization.alpha = to_double(e, e.value); };
    k["blowup.sign"] = [](RunConfig& c, const Entry& e) { c.blowup.regularization.sign = to_enum(e, kSigns); };
    k["blowup.expect"] = [](RunConfig& c, const Entry& e) { c.blowup.expect = to_enum(e, kExpectations); };
    k["blowup.threshold"] = [](RunConfig& c, const Entry& e) {
      c.blowup.threshold = to_double(e, e.value);
      if (!(c.blowup.threshold > 0.0)) fail(e, "must be > 0");
    };
    k["blowup.adaptive"] = [](RunConfig& c, const Entry& e) { c.blowup.adaptive = to_bool(e); };
    k["blowup.oracle_tol"] = [](RunConfig& c, const Entry& e) { c.blowup.oracle_tol = to_double(e, e.value); };
    k["blowup.t_star_tol"] = [](RunConfig& c, const Entry& e) { c.blowup.t_star_tol = to_double(e, e.value); };

    k["sweep.command"] = [](RunConfig& c, const Entry& e) {
      if (e.value != "run" && e.value != "blowup1d") fail(e, "expected run or blowup1d");
      c.sweep_command = e.value;
    };
    k["sweep.threads"] = [](RunConfig& c, const Entry& e) {
      c.sweep_threads = to_int(e, e.value);
      if (c.sweep_threads < 0) fail(e, "must be >= 0");
    };
    return k;
  }();
  return table;
}

void validate(RunConfig& c, const std::map<std::string, int>& lines) {
  auto line_of = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto check = [&](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(line_of(key), key, ex.what());
    }
  };
  if (!lines.contains("domain.n") && c.domain.dim >= 1) c.domain.n.assign(static_cast<std::size_t>(c.domain.dim), 64);
  if (c.domain.n.size() == 1 && c.domain.dim > 1) c.domain.n.assign(static_cast<std::size_t>(c.domain.dim), c.domain.n[0]);
  check("domain.n", [&] {
    if (c.domain.dim >= 1 && static_cast<int>(c.domain.n.size()) != c.domain.dim) {
      throw std::invalid_argument("expected 1 or " + std::to_string(c.domain.dim) + " sizes");
    }
    (void)c.domain.build();
  });
  check("solver.nu", [&] { c.solver.validate(); });
  check("blowup.mode", [&] { c.blowup.regularization.validate(); });
  for (const auto& [prefix, spec] : {std::pair<std::string, const FieldSpec*>{"initial", &c.initial},
                                     std::pair<std::string, const FieldSpec*>{"forcing", &c.forcing}}) {
    if (spec->kind == FieldKind::SingleMode) {
      check(prefix + ".wavevector", [&] {
        for (int j = c.domain.dim; j < 3; ++j) {
          if (spec->wavevector[static_cast<std::size_t>(j)] != 0) {
            throw std::invalid_argument("wavevector has components beyond the domain dimension");
          }
        }
      });
    }
    if (spec->kind == FieldKind::File && spec->path.empty()) {
      throw ConfigError(line_of(prefix + ".kind"), prefix + ".path", "file data needs a path");
    }
  }
  if (c.initial.kind == FieldKind::None) {
    throw ConfigError(line_of("initial.kind"), "initial.kind", "initial data cannot be none");
  }
}

}  // namespace

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (key.empty() ? std::string() : key + ": ") + message),
      line_(line),
      key_(std::move(key)) {}

std::vector<Entry> tokenize(std::istream& in) {
  std::vector<Entry> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected 'key = value', got '" + text + "'");
    Entry e{trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError(line, "", "missing key before '='");
    out.push_back(std::move(e));
  }
  return out;
}

Domain DomainSpec::build() const {
  return Domain(dim, n.size() == 1 ? std::vector<int>(static_cast<std::size_t>(std::max(dim, 1)), n[0]) : n,
                buoyancy_axis);
}

DiagnosticsConfig DiagnosticsSpec::build() const {
  DiagnosticsConfig c;
  c.p_list = p;
  c.s_list = s;
  c.slack = slack;
  c.linf_algebraic_c = linf_c;
  c.small_data_s = small_data_s;
  return c;
}

RunConfig parse(std::istream& in) {
  const auto entries = tokenize(in);
  RunConfig c;
  std::map<std::string, int> lines;
  const auto& table = setters();
  std::optional<int> axis, wavenumber;
  std::optional<int> forcing_axis, forcing_wavenumber;
  for (const auto& e : entries) {
    if (!lines.emplace(e.key, e.line).second) {
      fail(e, "repeated key (first set on line " + std::to_string(lines[e.key]) + ")");
    }
    if (e.key.rfind("sweep.", 0) == 0 && e.key != "sweep.command" && e.key != "sweep.threads") {
      const std::string target = e.key.substr(6);
      if (!table.contains(target) && target != "initial.axis" && target != "initial.wavenumber") {
        fail(e, "cannot sweep unknown key '" + target + "'");
      }
      auto values = split_list(e.value);
      if (values.empty()) fail(e, "sweep needs at least one value");
      c.sweep.emplace_back(target, std::move(values));
      continue;
    }
    if (e.key == "initial.axis" || e.key == "forcing.axis") {
      (e.key[0] == 'i' ? axis : forcing_axis) = to_int(e, e.value);
      continue;
    }
    if (e.key == "initial.wavenumber" || e.key == "forcing.wavenumber") {
      (e.key[0] == 'i' ? wavenumber : forcing_wavenumber) = to_int(e, e.value);
      continue;
    }
    const auto it = table.find(e.key);
    if (it == table.end()) fail(e, "unknown key");
    it->second(c, e);
  }
  // (axis, wavenumber) is shorthand for a wavevector along one axis.
  auto shorthand = [&](FieldSpec& spec, const std::string& prefix, std::optional<int> ax, std::optional<int> kn) {
    if (!ax && !kn) return;
    if (lines.contains(prefix + ".wavevector")) {
      const std::string key = prefix + (ax ? ".axis" : ".wavenumber");
      throw ConfigError(lines[key], key, "give either a wavevector or axis/wavenumber, not both");
    }
    const int a = ax.value_or(0);
    if (a < 0 || a > 2) throw ConfigError(lines[prefix + ".axis"], prefix + ".axis", "axis must be 0, 1 or 2");
    spec.wavevector = {0, 0, 0};
    spec.wavevector[static_cast<std::size_t>(a)] = kn.value_or(1);
  };
  shorthand(c.initial, "initial", axis, wavenumber);
  shorthand(c.forcing, "forcing", forcing_axis, forcing_wavenumber);
  validate(c, lines);
  return c;
}

RunConfig parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

RunConfig parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file " + path.string());
  return parse(in);
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

template <class T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    if constexpr (std::is_same_v<T, double>) {
      out += format_number(items[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += items[i];
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

void write_field(std::ostream& out, const std::string& prefix, const FieldSpec& f) {
  out << prefix << ".kind = " << enum_name(f.kind, kFieldKinds) << '\n';
  out << prefix << ".wavevector = " << f.wavevector[0] << ", " << f.wavevector[1] << ", " << f.wavevector[2] << '\n';
  out << prefix << ".amplitude = " << format_number(f.amplitude) << '\n';
  out << prefix << ".shape = " << (f.cosine ? "cos" : "sin") << '\n';
  out << prefix << ".r = " << format_number(f.r) << '\n';
  out << prefix << ".K = " << format_number(f.K) << '\n';
  out << prefix << ".seed = " << f.seed << '\n';
  if (f.l2_norm) out << prefix << ".l2_norm = " << format_number(*f.l2_norm) << '\n';
  out << prefix << ".path = " << f.path << '\n';
  out << prefix << ".restart = " << (f.restart ? "true" : "false") << '\n';
}

}  // namespace

std::string serialize(const RunConfig& c) {
  std::ostringstream out;
  out << "domain.dim = " << c.domain.dim << '\n';
  out << "domain.n = " << join(c.domain.n) << '\n';
  out << "domain.buoyancy_axis = " << c.domain.buoyancy_axis << '\n';

  out << "solver.nu = " << format_number(c.solver.nu) << '\n';
  out << "solver.alpha = " << format_number(c.solver.alpha) << '\n';
  out << "solver.dt = " << format_number(c.solver.dt) << '\n';
  out << "solver.t_end = " << format_number(c.solver.t_end) << '\n';
  out << "solver.scheme = " << enum_name(c.solver.scheme, kSchemes) << '\n';
  out << "solver.dealias = " << (c.solver.dealias ? "true" : "false") << '\n';
  if (c.solver.cfl_safety) out << "solver.cfl = " << format_number(*c.solver.cfl_safety) << '\n';

  write_field(out, "initial", c.initial);
  write_field(out, "forcing", c.forcing);

  const auto& d = c.diagnostics;
  out << "diagnostics.p = " << join(d.p) << '\n';
  out << "diagnostics.s = " << join(d.s) << '\n';
  out << "diagnostics.sample_every = " << format_number(d.sample_every) << '\n';
  out << "diagnostics.checks = " << (d.checks ? "true" : "false") << '\n';
  out << "diagnostics.slack = " << format_number(d.slack) << '\n';
  if (d.linf_c) out << "diagnostics.linf_c = " << format_number(*d.linf_c) << '\n';
  if (d.small_data_s) out << "diagnostics.small_data_s = " << format_number(*d.small_data_s) << '\n';

  out << "output.dir = " << c.output.dir << '\n';
  out << "output.csv = " << c.output.csv << '\n';
  out << "output.snapshots = " << (c.output.snapshots ? "true" : "false") << '\n';
  out << "output.checkpoint = " << c.output.checkpoint << '\n';

  const auto& b = c.blowup;
  out << "blowup.mode = " << enum_name(b.regularization.mode, kModes) << '\n';
  out << "blowup.nu = " << format_number(b.regularization.nu) << '\n';
  out << "blowup.alpha = " << format_number(b.regularization.alpha) << '\n';
  out << "blowup.sign = " << enum_name(b.regularization.sign, kSigns) << '\n';
  out << "blowup.expect = " << enum_name(b.expect, kExpectations) << '\n';
  out << "blowup.threshold = " << format_number(b.threshold) << '\n';
  out << "blowup.adaptive = " << (b.adaptive ? "true" : "false") << '\n';
  out << "blowup.oracle_tol = " << format_number(b.oracle_tol) << '\n';
  out << "blowup.t_star_tol = " << format_number(b.t_star_tol) << '\n';

  out << "sweep.command = " << c.sweep_command << '\n';
  out << "sweep.threads = " << c.sweep_threads << '\n';
  for (const auto& [key, values] : c.sweep) out << "sweep." << key << " = " << join(values) << '\n';
  return out.str();
}

RunConfig with_overrides(const RunConfig& config,
                         const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::istringstream in(serialize(config));
  auto entries = tokenize(in);
  for (const auto& [key, value] : overrides) {
    // the shorthand replaces the wavevector
    if (key == "initial.axis" || key == "initial.wavenumber" || key == "forcing.axis" ||
        key == "forcing.wavenumber") {
      const std::string wv = key.substr(0, key.find('.')) + ".wavevector";
      std::erase_if(entries, [&](const Entry& e) { return e.key == wv; });
    }
    auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.key == key; });
    if (it != entries.end()) {
      it->value = value;
    } else {
      entries.push_back(Entry{key, value, 0});
    }
  }
  std::string text;
  for (const auto& e : entries) text += e.key + " = " + e.value + '\n';
  return parse_string(text);
}

}  // namespace dpm::config
