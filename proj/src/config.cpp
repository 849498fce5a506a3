#include "nfbc/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nfbc/errors.hpp"

namespace nfbc {

namespace {

struct RawValue {
  std::string text;
  int line = 0;
  bool used = false;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

// section.key -> raw text, with duplicate detection.
std::map<std::string, RawValue> tokenize(const std::string& text) {
  std::map<std::string, RawValue> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(lineno, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    if (section.empty()) fail(lineno, "key before any [section]");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(lineno, "empty key");
    const std::string full = section + "." + key;
    if (out.count(full)) fail(lineno, "duplicate key '" + full + "'");
    out[full] = RawValue{trim(line.substr(eq + 1)), lineno, false};
  }
  return out;
}

double parse_double(const std::string& s, int line, const std::string& key) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': not a number: '" + s + "'");
  }
  if (pos != s.size()) fail(line, "key '" + key + "': trailing characters in '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, int line, const std::string& key) {
  if (s.empty() || s[0] == '-') fail(line, "key '" + key + "': expected a nonnegative integer, got '" + s + "'");
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': not an integer: '" + s + "'");
  }
  if (pos != s.size()) fail(line, "key '" + key + "': trailing characters in '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, int line, const std::string& key) {
  if (s == "true") return true;
  if (s == "false") return false;
  fail(line, "key '" + key + "': expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  if (trim(s).empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    parts.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

// Typed accessors over the raw map; absent keys keep the default.
class Reader {
 public:
  explicit Reader(std::map<std::string, RawValue>& raw) : raw_(raw) {}

  void get(const std::string& key, double& dst) {
    if (RawValue* r = find(key)) dst = parse_double(r->text, r->line, key);
  }
  // also serves std::uint64_t (same type as std::size_t on this target)
  void get(const std::string& key, std::size_t& dst) {
    if (RawValue* r = find(key)) dst = static_cast<std::size_t>(parse_uint(r->text, r->line, key));
  }
  void get(const std::string& key, int& dst) {
    if (RawValue* r = find(key)) dst = static_cast<int>(parse_uint(r->text, r->line, key));
  }
  void get(const std::string& key, bool& dst) {
    if (RawValue* r = find(key)) dst = parse_bool(r->text, r->line, key);
  }
  void get_enum(const std::string& key, std::string& dst,
                const std::vector<std::string>& allowed) {
    if (RawValue* r = find(key)) {
      for (const auto& a : allowed)
        if (r->text == a) {
          dst = r->text;
          return;
        }
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
      fail(r->line, "key '" + key + "': expected one of " + opts + ", got '" + r->text + "'");
    }
  }
  void get(const std::string& key, std::vector<std::size_t>& dst) {
    if (RawValue* r = find(key)) {
      dst.clear();
      for (const auto& p : split_list(r->text))
        dst.push_back(static_cast<std::size_t>(parse_uint(p, r->line, key)));
    }
  }
  void get(const std::string& key, std::vector<double>& dst) {
    if (RawValue* r = find(key)) {
      dst.clear();
      for (const auto& p : split_list(r->text)) dst.push_back(parse_double(p, r->line, key));
    }
  }

  RawValue* find(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

 private:
  std::map<std::string, RawValue>& raw_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
  auto raw = tokenize(text);
  Reader r(raw);
  ScenarioConfig cfg;

  RawValue* kind_raw = r.find("scenario.kind");
  if (!kind_raw) throw ConfigError("config: missing required key 'scenario.kind'");
  if (kind_raw->text == "objective") cfg.kind = ScenarioKind::Objective;
  else if (kind_raw->text == "fiber") cfg.kind = ScenarioKind::Fiber;
  else if (kind_raw->text == "nfbc") cfg.kind = ScenarioKind::Nfbc;
  else fail(kind_raw->line, "key 'scenario.kind': expected objective | fiber | nfbc, got '" + kind_raw->text + "'");

  r.get_enum("scenario.scale", cfg.scale, {"desk", "full"});

  r.get("domain.x_min", cfg.domain.x_min);
  r.get("domain.x_max", cfg.domain.x_max);
  r.get("domain.y_half", cfg.domain.y_half);
  r.get("domain.z_half", cfg.domain.z_half);
  r.get("domain.mesh_step", cfg.domain.mesh_step);
  r.get("domain.courant", cfg.domain.courant);
  r.get("domain.pml_cells", cfg.domain.pml_cells);
  r.get("domain.supersample", cfg.domain.supersample);

  r.get("source.wavelength", cfg.source.wavelength);
  r.get("source.power", cfg.source.power);
  r.get("source.ramp_cycles", cfg.source.ramp_cycles);
  r.get_enum("source.polarization", cfg.source.polarization, {"y"});

  if (cfg.kind == ScenarioKind::Objective) {
    r.get("beam.numerical_aperture", cfg.beam.numerical_aperture);
    r.get("beam.beam_diameter", cfg.beam.beam_diameter);
    r.get("beam.focus_offset", cfg.beam.focus_offset);
  } else {
    r.get("fiber.radius", cfg.fiber.radius);
    r.get("fiber.index", cfg.fiber.index);
  }
  if (cfg.kind == ScenarioKind::Nfbc) {
    r.get("grating.n_per_side", cfg.grating.grooves_per_side);
    r.get("grating.period", cfg.grating.period);
    r.get("grating.groove_radius", cfg.grating.groove_radius);
    r.get("grating.depth", cfg.grating.depth);
    r.get("grating.gap", cfg.grating.gap);
    r.get("sweep.ns", cfg.sweep.ns);
    r.get("sweep.sizes", cfg.sweep.sizes);
    r.get("sweep.reference_field", cfg.sweep.reference_field);
    r.get("sweep.tune_period", cfg.sweep.tune_period);
  }

  r.get("nanodiamond.enabled", cfg.nanodiamond.enabled);
  r.get("nanodiamond.size", cfg.nanodiamond.size);
  std::string shape = cfg.nanodiamond.shape == NdKind::Sphere ? "sphere" : "polyhedron";
  r.get_enum("nanodiamond.shape", shape, {"sphere", "polyhedron"});
  cfg.nanodiamond.shape = shape == "sphere" ? NdKind::Sphere : NdKind::Polyhedron;
  r.get("nanodiamond.seed", cfg.nanodiamond.seed);
  r.get("nanodiamond.vertices", cfg.nanodiamond.vertices);
  r.get("nanodiamond.index", cfg.nanodiamond.index);

  std::string mode = cfg.run.mode == RunMode::Cw ? "cw" : "pulsed";
  r.get_enum("run.mode", mode, {"cw", "pulsed"});
  cfg.run.mode = mode == "cw" ? RunMode::Cw : RunMode::Pulsed;
  r.get("run.max_time", cfg.run.max_time);
  r.get("run.measure_cycles", cfg.run.measure_cycles);
  r.get("run.pulse_lambda_min", cfg.run.pulse_lambda_min);
  r.get("run.pulse_lambda_max", cfg.run.pulse_lambda_max);
  r.get("run.pulse_count", cfg.run.pulse_count);
  r.get("run.pulse_sigma", cfg.run.pulse_sigma);
  r.get("run.sample_stride", cfg.run.sample_stride);

  for (const auto& [key, rv] : raw)
    if (!rv.used)
      fail(rv.line, "unknown key '" + key + "' for scenario kind '" +
                        std::string(to_string(cfg.kind)) + "'");
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on config file: " + path);
  return parse_config(ss.str());
}

std::string canonical_config(const ScenarioConfig& cfg) {
  std::ostringstream o;
  o << "[scenario]\n"
    << "kind = " << to_string(cfg.kind) << "\n"
    << "scale = " << cfg.scale << "\n\n";
  o << "[domain]\n"
    << "x_min = " << fmt(cfg.domain.x_min) << "\n"
    << "x_max = " << fmt(cfg.domain.x_max) << "\n"
    << "y_half = " << fmt(cfg.domain.y_half) << "\n"
    << "z_half = " << fmt(cfg.domain.z_half) << "\n"
    << "mesh_step = " << fmt(cfg.domain.mesh_step) << "\n"
    << "courant = " << fmt(cfg.domain.courant) << "\n"
    << "pml_cells = " << cfg.domain.pml_cells << "\n"
    << "supersample = " << cfg.domain.supersample << "\n\n";
  o << "[source]\n"
    << "wavelength = " << fmt(cfg.source.wavelength) << "\n"
    << "power = " << fmt(cfg.source.power) << "\n"
    << "ramp_cycles = " << fmt(cfg.source.ramp_cycles) << "\n"
    << "polarization = " << cfg.source.polarization << "\n\n";
  if (cfg.kind == ScenarioKind::Objective) {
    o << "[beam]\n"
      << "numerical_aperture = " << fmt(cfg.beam.numerical_aperture) << "\n"
      << "beam_diameter = " << fmt(cfg.beam.beam_diameter) << "\n"
      << "focus_offset = " << fmt(cfg.beam.focus_offset) << "\n\n";
  } else {
    o << "[fiber]\n"
      << "radius = " << fmt(cfg.fiber.radius) << "\n"
      << "index = " << fmt(cfg.fiber.index) << "\n\n";
  }
  if (cfg.kind == ScenarioKind::Nfbc) {
    o << "[grating]\n"
      << "n_per_side = " << cfg.grating.grooves_per_side << "\n"
      << "period = " << fmt(cfg.grating.period) << "\n"
      << "groove_radius = " << fmt(cfg.grating.groove_radius) << "\n"
      << "depth = " << fmt(cfg.grating.depth) << "\n"
      << "gap = " << fmt(cfg.grating.gap) << "\n\n";
  }
  o << "[nanodiamond]\n"
    << "enabled = " << (cfg.nanodiamond.enabled ? "true" : "false") << "\n"
    << "size = " << fmt(cfg.nanodiamond.size) << "\n"
    << "shape = " << (cfg.nanodiamond.shape == NdKind::Sphere ? "sphere" : "polyhedron") << "\n"
    << "seed = " << cfg.nanodiamond.seed << "\n"
    << "vertices = " << cfg.nanodiamond.vertices << "\n"
    << "index = " << fmt(cfg.nanodiamond.index) << "\n\n";
  o << "[run]\n"
    << "mode = " << to_string(cfg.run.mode) << "\n"
    << "max_time = " << fmt(cfg.run.max_time) << "\n"
    << "measure_cycles = " << fmt(cfg.run.measure_cycles) << "\n"
    << "pulse_lambda_min = " << fmt(cfg.run.pulse_lambda_min) << "\n"
    << "pulse_lambda_max = " << fmt(cfg.run.pulse_lambda_max) << "\n"
    << "pulse_count = " << cfg.run.pulse_count << "\n"
    << "pulse_sigma = " << fmt(cfg.run.pulse_sigma) << "\n"
    << "sample_stride = " << cfg.run.sample_stride << "\n";
  if (cfg.kind == ScenarioKind::Nfbc) {
    o << "\n[sweep]\n";
    o << "ns = ";
    for (std::size_t i = 0; i < cfg.sweep.ns.size(); ++i)
      o << (i ? "," : "") << cfg.sweep.ns[i];
    o << "\n";
    o << "sizes = ";
    for (std::size_t i = 0; i < cfg.sweep.sizes.size(); ++i)
      o << (i ? "," : "") << fmt(cfg.sweep.sizes[i]);
    o << "\n";
    o << "reference_field = " << fmt(cfg.sweep.reference_field) << "\n"
      << "tune_period = " << (cfg.sweep.tune_period ? "true" : "false") << "\n";
  }
  return o.str();
}

} // namespace nfbc
