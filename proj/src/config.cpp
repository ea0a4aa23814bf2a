#include "smolv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace smolv {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"model", {"d", "M", "alpha", "kappa", "mu"}},
    {"grid", {"V", "G"}},
    {"time", {"dt", "t_end"}},
    {"truncation", {"R"}},
    {"init", {"r"}},  // plus g1..gM
    {"particles", {"N", "epsilon", "mode", "sweep", "common_noise", "dt", "seed"}},
    {"output", {"every", "snapshots", "dir"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

bool is_init_component_key(const std::string& key) {
  if (key.size() < 2 || key[0] != 'g') return false;
  for (std::size_t i = 1; i < key.size(); ++i) {
    if (key[i] < '0' || key[i] > '9') return false;
  }
  return true;
}

[[noreturn]] void fail(const std::string& section, const std::string& key, int line,
                       const std::string& msg) {
  std::ostringstream os;
  os << "config";
  if (line > 0) os << " line " << line;
  os << ": " << section << '.' << key << ": " << msg;
  throw ConfigError(os.str());
}

double to_double(const std::string& text, const std::string& section, const std::string& key,
                 int line) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(section, key, line, "expected a number, got '" + s + "'");
  }
  return v;
}

long long to_integer(const std::string& text, const std::string& section, const std::string& key,
                     int line) {
  const std::string s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(section, key, line, "expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<double> to_list(const std::string& text, const std::string& section,
                            const std::string& key, int line) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const std::string& tok : split(text, ',')) out.push_back(to_double(tok, section, key, line));
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += num(xs[i]);
  }
  return s;
}

// "weight=0.5 mean=0,1 var=1 ; weight=0.5 mean=... var=..."
std::vector<GaussianComponent> parse_mixture(const std::string& text, int d, const std::string& key,
                                             int line) {
  std::vector<GaussianComponent> comps;
  for (const std::string& part : split(text, ';')) {
    if (part.empty()) fail("init", key, line, "empty mixture component");
    GaussianComponent c;
    c.weight = -1.0;
    std::istringstream is(part);
    std::string field;
    while (is >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) fail("init", key, line, "expected name=value, got '" + field + "'");
      const std::string name = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (name == "weight") {
        c.weight = to_double(value, "init", key, line);
      } else if (name == "mean" || name == "var") {
        std::vector<double> xs = to_list(value, "init", key, line);
        if (xs.size() == 1 && d > 1) xs.assign(d, xs[0]);
        if (static_cast<int>(xs.size()) != d) {
          fail("init", key, line, name + " needs 1 or " + std::to_string(d) + " entries");
        }
        (name == "mean" ? c.mean : c.var) = xs;
      } else {
        fail("init", key, line, "unknown component field '" + name + "'");
      }
    }
    if (c.mean.empty()) c.mean.assign(d, 0.0);
    if (c.var.empty()) c.var.assign(d, 1.0);
    comps.push_back(c);
  }
  // Weights may be omitted only when all of them are.
  std::size_t given = 0;
  for (const auto& c : comps) given += c.weight >= 0.0 ? 1 : 0;
  const bool any = given > 0;
  if (any && given != comps.size()) fail("init", key, line, "give weight for every component or none");
  if (!any) {
    for (auto& c : comps) c.weight = 1.0 / static_cast<double>(comps.size());
  }
  return comps;
}

ParticleMode to_mode(const std::string& s, int line) {
  if (s == "meanfield") return ParticleMode::MeanField;
  if (s == "spatial") return ParticleMode::Spatial;
  fail("particles", "mode", line, "expected meanfield|spatial, got '" + s + "'");
}

SweepKind to_sweep(const std::string& s, int line) {
  if (s == "pairwise") return SweepKind::Pairwise;
  if (s == "majorant") return SweepKind::Majorant;
  if (s == "cells") return SweepKind::CellList;
  fail("particles", "sweep", line, "expected pairwise|majorant|cells, got '" + s + "'");
}

const char* mode_name(ParticleMode m) {
  return m == ParticleMode::MeanField ? "meanfield" : "spatial";
}

const char* sweep_name(SweepKind s) {
  switch (s) {
    case SweepKind::Pairwise: return "pairwise";
    case SweepKind::Majorant: return "majorant";
    case SweepKind::CellList: return "cells";
  }
  return "?";
}

}  // namespace

void validate_config(const Config& config) {
  config.params.validate();
  config.init.validate(config.params.d, config.params.M);
  config.particles.validate(config.params);
  const OutputSpec& out = config.output;
  if (!(out.output_every > 0.0)) throw ConfigError("config: output.every must be > 0");
  for (double t : out.snapshot_times) {
    if (!(t >= 0.0 && t <= config.params.t_end)) {
      throw ConfigError("config: output.snapshots: time " + num(t) + " outside [0, t_end]");
    }
  }
  if (out.out_dir.empty()) throw ConfigError("config: output.dir must not be empty");
}

Config parse_config(const std::string& text) {
  std::map<std::string, Section> doc;
  {
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(s, "", line, "malformed section header");
        section = trim(s.substr(1, s.size() - 2));
        if (!kKnownKeys.count(section)) {
          throw ConfigError("config line " + std::to_string(line) + ": unknown section [" +
                            section + "]");
        }
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line) + ": expected key = value");
      }
      if (section.empty()) {
        throw ConfigError("config line " + std::to_string(line) + ": key outside any section");
      }
      const std::string key = trim(s.substr(0, eq));
      const bool known = kKnownKeys.at(section).count(key) ||
                         (section == "init" && is_init_component_key(key));
      if (!known) fail(section, key, line, "unknown key");
      auto& sec = doc[section];
      if (sec.count(key)) {
        fail(section, key, line,
             "duplicate key (first set on line " + std::to_string(sec[key].line) + ")");
      }
      sec[key] = {trim(s.substr(eq + 1)), line};
    }
  }

  auto find = [&](const std::string& section, const std::string& key) -> const Entry* {
    auto it = doc.find(section);
    if (it == doc.end()) return nullptr;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? nullptr : &jt->second;
  };
  auto get_double = [&](const std::string& section, const std::string& key, double dflt) {
    const Entry* e = find(section, key);
    return e ? to_double(e->value, section, key, e->line) : dflt;
  };
  auto get_int = [&](const std::string& section, const std::string& key, long long dflt) {
    const Entry* e = find(section, key);
    return e ? to_integer(e->value, section, key, e->line) : dflt;
  };
  auto require = [&](const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) fail(section, key, 0, "missing required key");
    return e;
  };

  Config cfg;
  Params& p = cfg.params;
  {
    const Entry* d = require("model", "d");
    const Entry* M = require("model", "M");
    p.d = static_cast<int>(to_integer(d->value, "model", "d", d->line));
    p.M = static_cast<int>(to_integer(M->value, "model", "M", M->line));
    if (p.d < 1 || p.d > 3) fail("model", "d", d->line, "must be 1, 2 or 3");
    if (p.M < 1) fail("model", "M", M->line, "must be >= 1");
  }
  p.alpha = get_double("model", "alpha", 1.0);
  p.kappa = get_double("model", "kappa", 1.0);
  p.mu = get_double("model", "mu", p.kappa);
  p.G = static_cast<int>(get_int("grid", "G", 256));
  p.t_end = get_double("time", "t_end", 1.0);

  if (const Entry* e = find("grid", "V"); e && e->value != "auto") {
    p.V = to_double(e->value, "grid", "V", e->line);
    cfg.V_auto = false;
  } else {
    if (!(p.alpha > 0.0 && p.kappa > 0.0)) {
      fail("grid", "V", e ? e->line : 0, "auto needs alpha > 0 and kappa > 0");
    }
    p.V = default_box_half_width(p);
    cfg.V_auto = true;
  }
  if (const Entry* e = find("time", "dt"); e && e->value != "auto") {
    p.dt = to_double(e->value, "time", "dt", e->line);
    if (!(p.dt > 0.0)) fail("time", "dt", e->line, "must be > 0 or auto");
    cfg.dt_auto = false;
  } else {
    p.dt = 0.0;
    cfg.dt_auto = true;
  }
  if (const Entry* e = find("truncation", "R"); e && e->value != "infinite") {
    p.R = to_double(e->value, "truncation", "R", e->line);
  }

  // init
  {
    cfg.init.levels.resize(p.M);
    if (const Entry* e = find("init", "r")) {
      const std::vector<double> r = to_list(e->value, "init", "r", e->line);
      if (static_cast<int>(r.size()) != p.M) {
        fail("init", "r", e->line, "expected " + std::to_string(p.M) + " entries");
      }
      for (int m = 0; m < p.M; ++m) cfg.init.levels[m].r = r[m];
    } else {
      cfg.init.levels[0].r = 1.0;
    }
    if (auto it = doc.find("init"); it != doc.end()) {
      for (const auto& [key, entry] : it->second) {
        if (!is_init_component_key(key)) continue;
        const long long m = to_integer(key.substr(1), "init", key, entry.line);
        if (m < 1 || m > p.M) fail("init", key, entry.line, "level out of range 1..M");
        cfg.init.levels[m - 1].components = parse_mixture(entry.value, p.d, key, entry.line);
      }
    }
    for (LevelInit& lvl : cfg.init.levels) {
      if (lvl.r > 0.0 && lvl.components.empty()) {
        lvl.components.push_back({1.0, std::vector<double>(p.d, 0.0), std::vector<double>(p.d, 1.0)});
      }
    }
  }

  // particles
  {
    ParticleConfig& pc = cfg.particles;
    const long long N = get_int("particles", "N", 1000);
    if (N < 2) fail("particles", "N", find("particles", "N")->line, "must be >= 2");
    pc.N = static_cast<std::size_t>(N);
    pc.epsilon = get_double("particles", "epsilon", 0.1);
    pc.dt_p = get_double("particles", "dt", 0.002);
    pc.mu = p.mu;
    if (const Entry* e = find("particles", "mode")) pc.mode = to_mode(e->value, e->line);
    if (const Entry* e = find("particles", "sweep"); e && e->value != "auto") {
      pc.sweep = to_sweep(e->value, e->line);
    } else {
      pc.sweep = pc.mode == ParticleMode::MeanField ? SweepKind::Majorant : SweepKind::CellList;
    }
    if (const Entry* e = find("particles", "common_noise"); e && e->value != "none") {
      for (const std::string& vec : split(e->value, ';')) {
        std::vector<double> sigma = to_list(vec, "particles", "common_noise", e->line);
        if (static_cast<int>(sigma.size()) != p.d) {
          fail("particles", "common_noise", e->line,
               "each vector needs " + std::to_string(p.d) + " components");
        }
        pc.common_noise.push_back(sigma);
      }
    }
    const long long seed = get_int("particles", "seed", 0);
    if (seed < 0) fail("particles", "seed", find("particles", "seed")->line, "must be >= 0");
    p.seed = static_cast<std::uint64_t>(seed);
  }

  // output
  {
    OutputSpec& o = cfg.output;
    o.output_every = get_double("output", "every", 0.1);
    if (const Entry* e = find("output", "snapshots")) {
      o.snapshot_times = to_list(e->value, "output", "snapshots", e->line);
    } else {
      o.snapshot_times = {0.0, p.t_end};
    }
    if (const Entry* e = find("output", "dir")) o.out_dir = e->value;
  }

  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    throw ConfigError(what.rfind("config", 0) == 0 ? what : "config: " + what);
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  try {
    return parse_config(os.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string render_config(const Config& cfg) {
  const Params& p = cfg.params;
  std::ostringstream os;
  os << "[model]\n"
     << "d = " << p.d << "\n"
     << "M = " << p.M << "\n"
     << "alpha = " << num(p.alpha) << "\n"
     << "kappa = " << num(p.kappa) << "\n"
     << "mu = " << num(cfg.particles.mu) << "\n\n";
  os << "[grid]\n"
     << "V = " << num(p.V) << "\n"
     << "G = " << p.G << "\n\n";
  os << "[time]\n"
     << "dt = " << (p.dt > 0.0 ? num(p.dt) : std::string("auto")) << "\n"
     << "t_end = " << num(p.t_end) << "\n\n";
  os << "[truncation]\n"
     << "R = " << (p.R ? num(*p.R) : std::string("infinite")) << "\n\n";
  os << "[init]\n";
  {
    std::vector<double> r;
    for (const auto& lvl : cfg.init.levels) r.push_back(lvl.r);
    os << "r = " << list(r) << "\n";
    for (std::size_t m = 0; m < cfg.init.levels.size(); ++m) {
      const auto& comps = cfg.init.levels[m].components;
      if (comps.empty()) continue;
      os << "g" << m + 1 << " = ";
      for (std::size_t c = 0; c < comps.size(); ++c) {
        if (c) os << " ; ";
        std::string mean = list(comps[c].mean), var = list(comps[c].var);
        for (std::string* s : {&mean, &var}) {
          s->erase(std::remove(s->begin(), s->end(), ' '), s->end());
        }
        os << "weight=" << num(comps[c].weight) << " mean=" << mean << " var=" << var;
      }
      os << "\n";
    }
  }
  os << "\n[particles]\n"
     << "N = " << cfg.particles.N << "\n"
     << "epsilon = " << num(cfg.particles.epsilon) << "\n"
     << "mode = " << mode_name(cfg.particles.mode) << "\n"
     << "sweep = " << sweep_name(cfg.particles.sweep) << "\n"
     << "common_noise = ";
  if (cfg.particles.common_noise.empty()) os << "none";
  for (std::size_t k = 0; k < cfg.particles.common_noise.size(); ++k) {
    if (k) os << " ; ";
    os << list(cfg.particles.common_noise[k]);
  }
  os << "\n"
     << "dt = " << num(cfg.particles.dt_p) << "\n"
     << "seed = " << p.seed << "\n\n";
  os << "[output]\n"
     << "every = " << num(cfg.output.output_every) << "\n"
     << "snapshots = " << list(cfg.output.snapshot_times) << "\n"
     << "dir = " << cfg.output.out_dir << "\n";
  return os.str();
}

std::string config_reference() {
  return R"(Config file: flat sections of `key = value`, `#` starts a comment.
Unknown sections or keys are errors.

[model]
  d        velocity dimension, 1..3                  (required)
  M        number of mass levels, >= 1              (required)
  alpha    Stokes coefficient scale                  default 1
  kappa    PDE velocity diffusivity                  default 1
  mu       particle diffusivity                      default = kappa
[grid]
  V        box half-width or `auto`                  default auto = ceil(8 sqrt(kappa max c(m)))
  G        cells per axis, >= 2                      default 256
[time]
  dt       PDE step or `auto` (stability bound, capped at 0.05)   default auto
  t_end    final time                                default 1
[truncation]
  R        collision cutoff radius or `infinite`, must not exceed V   default infinite
[init]
  r        per-level weights r(1),...,r(M), summing to 1   default 1,0,...,0
  g<m>     Gaussian mixture of level m, components separated by `;`:
             weight=<w> mean=<v1,..,vd> var=<s1,..,sd>
           omitted weights are equal, mean defaults to 0, var to 1.
           Levels with r(m) > 0 and no g<m> use N(0, I).
[particles]
  N             initial particle count           default 1000
  epsilon       interaction radius (spatial)     default 0.1
  mode          meanfield | spatial              default meanfield
  sweep         pairwise | majorant | cells | auto   default auto (majorant, or cells if spatial)
  common_noise  vectors sigma_k separated by `;`, components by `,`, or none   default none
  dt            particle step                    default 0.002
  seed          RNG seed, >= 0                   default 0
[output]
  every      diagnostics cadence                 default 0.1
  snapshots  comma-separated snapshot times      default 0, t_end
  dir        output directory                    default smolv_out
)";
}

}  // namespace smolv
