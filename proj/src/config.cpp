#include "nlwave/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "nlwave/io.hpp"

namespace nlwave {

namespace {

using VT = ValueType;

const std::vector<std::string> kSections = {"model", "state", "integrator", "experiment", "continuum", "output", "run"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
  if (!std::isfinite(v)) return io::format_number(v);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const ConfigKey* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : config_schema()) {
    if (k.section == section && k.key == key) return &k;
  }
  return nullptr;
}

// Strips quotes from text and checks the type; returns the canonical form.
std::string canonical_value(const ConfigKey& k, std::string value, const std::string& where) {
  auto fail = [&](const std::string& what) {
    throw ValidationError(where + ": " + k.section + "." + k.key + " " + what + ", got '" + value + "'");
  };
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    if (k.type != VT::text) fail("expects an unquoted value");
    value = value.substr(1, value.size() - 2);
    if (value.find('"') != std::string::npos) fail("must not contain quotes");
    return value;
  }
  switch (k.type) {
    case VT::text:
      return value;
    case VT::boolean:
      if (value != "true" && value != "false") fail("expects true or false");
      return value;
    case VT::integer: {
      long v = 0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (value.empty() || res.ec != std::errc{} || res.ptr != value.data() + value.size()) fail("expects an integer");
      return std::to_string(v);
    }
    case VT::unsigned_integer: {
      std::uint64_t v = 0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (value.empty() || res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        fail("expects a non-negative integer");
      }
      return std::to_string(v);
    }
    case VT::real: {
      double v = 0;
      try {
        v = io::parse_number(value);
      } catch (const Error&) {
        fail("expects a number");
      }
      return shortest(v);
    }
  }
  return value;
}

void assign(std::map<std::string, std::string>& values, const std::string& section, const std::string& key,
            const std::string& value, const std::string& where) {
  const ConfigKey* k = find_key(section, key);
  if (k == nullptr) throw ValidationError(where + ": unknown key '" + key + "' in section [" + section + "]");
  values[section + "." + key] = canonical_value(*k, value, where);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      out.push_back(io::parse_number(token));
    } catch (const Error&) {
      throw ValidationError(what + ": '" + token + "' is not a number");
    }
  }
  return out;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"model", "q", VT::integer, "", true},
      {"model", "w", VT::real, "0"},
      {"model", "k", VT::text, "flip_graph"},
      {"model", "k_scale", VT::real, "1"},
      {"model", "k_kappa", VT::real, "1"},
      {"model", "k_shift", VT::real, "0"},
      {"model", "k_seed", VT::unsigned_integer, "", false, true},
      {"model", "k_lambda_min", VT::real, "0.5"},
      {"model", "k_lambda_max", VT::real, "2"},
      {"model", "k_file", VT::text, ""},
      {"state", "kind", VT::text, "symmetric"},
      {"state", "f", VT::text, "s"},
      {"state", "g", VT::text, "s"},
      {"state", "beta", VT::real, "0.1"},
      {"state", "seed", VT::unsigned_integer, "", false, true},
      {"state", "q_values", VT::text, ""},
      {"state", "p_values", VT::text, ""},
      {"state", "file", VT::text, ""},
      {"integrator", "dt", VT::real, "0.0005"},
      {"integrator", "steps", VT::integer, "20000"},
      {"integrator", "binding", VT::real, "50"},
      {"integrator", "record_stride", VT::integer, "20"},
      {"experiment", "name", VT::text, ""},
      {"experiment", "epsilon", VT::real, "1e-08"},
      {"experiment", "perturb_index", VT::integer, "0"},
      {"experiment", "renorm_interval", VT::integer, "10"},
      {"experiment", "tail_fraction", VT::real, "0.2"},
      {"experiment", "seed", VT::unsigned_integer, "", false, true},
      {"experiment", "repeats", VT::integer, "1"},
      {"experiment", "w_grid", VT::text, ""},
      {"experiment", "w_min", VT::real, "0"},
      {"experiment", "w_max", VT::real, "2"},
      {"experiment", "w_points", VT::integer, "21"},
      {"experiment", "wstar_max", VT::real, "50"},
      {"experiment", "grid_points", VT::integer, "200"},
      {"experiment", "tol", VT::real, "0.0001"},
      {"experiment", "detm", VT::boolean, "false"},
      {"experiment", "threads", VT::integer, "0"},
      {"continuum", "n_bodies", VT::integer, "2"},
      {"continuum", "mass", VT::real, "1"},
      {"continuum", "spring", VT::real, "1"},
      {"continuum", "w", VT::real, "0.22"},
      {"continuum", "sigma", VT::real, "2"},
      {"continuum", "epsilon", VT::real, "0.5"},
      {"continuum", "cap", VT::integer, "12"},
      {"continuum", "parity", VT::text, "even"},
      {"continuum", "spin", VT::real, "0"},
      {"continuum", "dump", VT::boolean, "true"},
      {"output", "dir", VT::text, "out"},
      {"run", "seed", VT::unsigned_integer, "1"},
  };
  return schema;
}

const std::string& RunConfig::raw(const std::string& path) const {
  const auto it = values.find(path);
  if (it == values.end()) throw ValidationError("config: no key " + path);
  return it->second;
}

long RunConfig::get_int(const std::string& path) const { return std::stol(raw(path)); }
std::uint64_t RunConfig::get_uint(const std::string& path) const { return std::stoull(raw(path)); }
double RunConfig::get_real(const std::string& path) const { return io::parse_number(raw(path)); }
std::string RunConfig::get_text(const std::string& path) const { return raw(path); }
bool RunConfig::get_bool(const std::string& path) const { return raw(path) == "true"; }

std::string RunConfig::to_text() const {
  std::ostringstream out;
  std::string current;
  for (const auto& k : config_schema()) {
    if (k.section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << k.section << "]\n";
      current = k.section;
    }
    const std::string& v = raw(k.section + "." + k.key);
    out << k.key << " = ";
    if (k.type == VT::text) {
      out << '"' << v << '"';
    } else {
      out << v;
    }
    out << '\n';
  }
  return out.str();
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> given;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno);
    // Drop comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        throw ValidationError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected 'key = value', got '" + line + "'");
    if (section.empty()) throw ValidationError(where + ": key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    if (given.count(section + "." + key)) throw ValidationError(where + ": duplicate key " + section + "." + key);
    assign(given, section, key, trim(line.substr(eq + 1)), where);
  }

  for (const auto& ov : overrides) {
    const std::string where = "override '" + ov + "'";
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ValidationError(where + ": expected section.key=value");
    }
    assign(given, trim(ov.substr(0, dot)), trim(ov.substr(dot + 1, eq - dot - 1)), trim(ov.substr(eq + 1)), where);
  }

  RunConfig cfg;
  for (const auto& k : config_schema()) {
    const std::string path = k.section + "." + k.key;
    if (auto it = given.find(path); it != given.end()) {
      cfg.values[path] = it->second;
    } else if (k.required) {
      throw ValidationError("config: missing required key " + path);
    } else if (!k.inherits_seed) {
      cfg.values[path] = canonical_value(k, k.fallback, "default for " + path);
    }
  }
  for (const auto& k : config_schema()) {
    if (k.inherits_seed && !cfg.values.count(k.section + "." + k.key)) {
      cfg.values[k.section + "." + k.key] = cfg.values.at("run.seed");
    }
  }
  const long q = cfg.get_int("model.q");
  if (q < 1 || q > 13 || q % 2 == 0) {
    throw ValidationError("config: model.q must be odd with 1 <= q <= 13, got " + std::to_string(q));
  }
  return cfg;
}

KSpec kspec_from_config(const RunConfig& cfg) {
  const std::string kind = cfg.get_text("model.k");
  if (kind == "identity") return kbuild::Identity{cfg.get_real("model.k_scale")};
  if (kind == "flip_graph") return kbuild::FlipGraph{cfg.get_real("model.k_kappa"), cfg.get_real("model.k_shift")};
  if (kind == "random_spd") {
    return kbuild::RandomSpd{cfg.get_uint("model.k_seed"), cfg.get_real("model.k_lambda_min"),
                             cfg.get_real("model.k_lambda_max")};
  }
  if (kind == "from_file") {
    if (cfg.get_text("model.k_file").empty()) throw ValidationError("config: model.k = from_file needs model.k_file");
    return kbuild::FromFile{cfg.get_text("model.k_file")};
  }
  throw ValidationError("config: model.k must be identity, flip_graph, random_spd or from_file, got '" + kind + "'");
}

SpinModel model_from_config(const RunConfig& cfg) {
  const long q = cfg.get_int("model.q");
  if (q < 1 || q > 13 || q % 2 == 0) {
    throw ValidationError("config: model.q must be odd with 1 <= q <= 13, got " + std::to_string(q));
  }
  const double w = cfg.get_real("model.w");
  if (!(w >= 0.0)) throw ValidationError("config: model.w must be >= 0");
  return make_model(static_cast<int>(q), kspec_from_config(cfg), w);
}

WaveState state_from_config(const RunConfig& cfg, const SpinConfigSpace& space) {
  const std::string kind = cfg.get_text("state.kind");
  if (kind == "symmetric") {
    return make_symmetric_state(space, config_function(space, cfg.get_text("state.f")),
                                config_function(space, cfg.get_text("state.g")), cfg.get_real("state.beta"));
  }
  if (kind == "random") return random_state(space, cfg.get_uint("state.seed"));
  WaveState raw;
  if (kind == "raw") {
    const auto q = parse_list(cfg.get_text("state.q_values"), "state.q_values");
    const auto p = parse_list(cfg.get_text("state.p_values"), "state.p_values");
    raw.q = Eigen::Map<const Vector>(q.data(), static_cast<Eigen::Index>(q.size()));
    raw.p = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
  } else if (kind == "file") {
    raw = read_state_file(cfg.get_text("state.file"));
  } else {
    throw ValidationError("config: state.kind must be symmetric, random, raw or file, got '" + kind + "'");
  }
  if (raw.q.size() != space.n || raw.p.size() != space.n) {
    throw ValidationError("config: state needs " + std::to_string(space.n) + " Q and P values");
  }
  return make_state(raw.q, raw.p);
}

IntegratorConfig integrator_from_config(const RunConfig& cfg) {
  IntegratorConfig ic;
  ic.dt = cfg.get_real("integrator.dt");
  ic.steps = cfg.get_int("integrator.steps");
  ic.binding = cfg.get_real("integrator.binding");
  ic.record_stride = cfg.get_int("integrator.record_stride");
  ic.validate();
  return ic;
}

continuum::Params continuum_from_config(const RunConfig& cfg) {
  continuum::Params p;
  p.n_bodies = static_cast<int>(cfg.get_int("continuum.n_bodies"));
  p.mass = cfg.get_real("continuum.mass");
  p.spring = cfg.get_real("continuum.spring");
  p.w = cfg.get_real("continuum.w");
  p.sigma = cfg.get_real("continuum.sigma");
  p.epsilon = cfg.get_real("continuum.epsilon");
  p.validate();
  return p;
}

std::vector<double> w_grid_from_config(const RunConfig& cfg) {
  const std::string listed = cfg.get_text("experiment.w_grid");
  if (!listed.empty()) {
    auto grid = parse_list(listed, "experiment.w_grid");
    if (grid.empty()) throw ValidationError("config: experiment.w_grid is empty");
    return grid;
  }
  const long n = cfg.get_int("experiment.w_points");
  const double lo = cfg.get_real("experiment.w_min");
  const double hi = cfg.get_real("experiment.w_max");
  if (n < 1) throw ValidationError("config: experiment.w_points must be >= 1");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) grid[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

}  // namespace nlwave
