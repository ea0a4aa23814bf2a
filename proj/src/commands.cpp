#include "smolv/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "smolv/init.hpp"
#include "smolv/io.hpp"

namespace smolv {

namespace fs = std::filesystem;

namespace {

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

RunControl control_of(const Config& config) {
  RunControl c;
  c.output_every = config.output.output_every;
  c.snapshot_times = config.output.snapshot_times;
  return c;
}

void echo_config(Config config, const fs::path& dir) {
  config.output.out_dir = dir.string();
  write_text(dir / kResolvedConfigName, render_config(config));
}

double effective_diffusivity(const Config& c, const std::string& source) {
  return source == "pde" ? c.params.kappa : c.particles.mu;
}

bool same_init(const InitSpec& a, const InitSpec& b) {
  if (a.levels.size() != b.levels.size()) return false;
  for (std::size_t m = 0; m < a.levels.size(); ++m) {
    const LevelInit& x = a.levels[m];
    const LevelInit& y = b.levels[m];
    if (x.r != y.r || x.components.size() != y.components.size()) return false;
    for (std::size_t c = 0; c < x.components.size(); ++c) {
      const auto& p = x.components[c];
      const auto& q = y.components[c];
      if (p.weight != q.weight || p.mean != q.mean || p.var != q.var) return false;
    }
  }
  return true;
}

void check_compatible(const Config& a, const std::string& sa, const Config& b,
                      const std::string& sb) {
  auto mismatch = [](const std::string& what) {
    throw ConfigError("compare: run configs differ in " + what);
  };
  const Params& p = a.params;
  const Params& q = b.params;
  if (p.d != q.d) mismatch("d");
  if (p.M != q.M) mismatch("M");
  if (p.alpha != q.alpha) mismatch("alpha");
  if (p.V != q.V) mismatch("V");
  if (p.G != q.G) mismatch("G");
  if (p.t_end != q.t_end) mismatch("t_end");
  if (!same_init(a.init, b.init)) mismatch("init");
  if (effective_diffusivity(a, sa) != effective_diffusivity(b, sb)) {
    mismatch("velocity diffusivity (kappa of the PDE vs mu of the particles)");
  }
  for (const auto* side : {&a, &b}) {
    const std::string& src = side == &a ? sa : sb;
    if (src != "particles") continue;
    if (side->particles.mode != ParticleMode::MeanField) {
      throw ConfigError("compare: particle run must be mean-field");
    }
    if (!side->particles.common_noise.empty()) {
      throw ConfigError("compare: particle run must not use common noise");
    }
  }
}

}  // namespace

RunOutput solve_command(const Config& config, const fs::path& dir) {
  validate_config(config);
  prepare_dir(dir);
  echo_config(config, dir);
  const VelocityGrid grid = build_grid(config.params);
  const DensitySet initial = discretize_initial(config.init, grid, config.params.M);
  RunOutput out = run(config.params, initial, control_of(config));
  write_diagnostics_csv(dir / kDiagnosticsName, out.rows, config.params.M, config.params.d);
  for (const Snapshot& s : out.snapshots) write_snapshot(dir, "pde", s);
  return out;
}

ParticleRunOutput particles_command(const Config& config, const fs::path& dir) {
  validate_config(config);
  prepare_dir(dir);
  echo_config(config, dir);
  ParticleRunOutput out =
      run_particles(config.params, config.particles, config.init, control_of(config));
  write_diagnostics_csv(dir / kDiagnosticsName, out.rows, config.params.M, config.params.d);
  for (const Snapshot& s : out.snapshots) write_snapshot(dir, "particles", s);
  return out;
}

std::vector<SweepRow> sweep_command(const Config& base, const std::vector<std::string>& kappas,
                                    const fs::path& dir) {
  if (kappas.empty()) throw ConfigError("sweep: kappa list is empty");
  std::vector<SweepRow> rows;
  for (const std::string& label : kappas) {
    double k = 0.0;
    const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), k);
    if (label.empty() || ec != std::errc() || ptr != label.data() + label.size() ||
        !(k > 0.0) || !std::isfinite(k)) {
      throw ConfigError("sweep: kappa values must be positive numbers, got '" + label + "'");
    }
    rows.push_back({label, k, 0.0, 0.0});
  }
  prepare_dir(dir);
  for (SweepRow& row : rows) {
    Config cfg = base;
    cfg.params.kappa = row.kappa;
    if (cfg.V_auto) cfg.params.V = default_box_half_width(cfg.params);
    const fs::path sub = dir / ("kappa_" + row.kappa_label);
    cfg.output.out_dir = sub.string();
    const RunOutput out = solve_command(cfg, sub);
    row.expelled_at_tend = out.rows.back().expelled;
    row.T_final = out.rows.back().T;
  }
  std::string text = "kappa,expelled_at_tend,T_final\n";
  for (const SweepRow& row : rows) {
    text += format_double(row.kappa) + "," + format_double(row.expelled_at_tend) + "," +
            format_double(row.T_final) + "\n";
  }
  write_text(dir / "summary.csv", text);
  return rows;
}

std::string run_source(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a run directory: " + dir.string());
  bool pde = false, particles = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snapshot_pde_", 0) == 0) pde = true;
    if (name.rfind("snapshot_particles_", 0) == 0) particles = true;
  }
  if (pde == particles) {
    throw IoError(dir.string() + ": expected snapshots from exactly one source");
  }
  return pde ? "pde" : "particles";
}

std::vector<CompareRow> compare_command(const fs::path& dir_a, const fs::path& dir_b,
                                        const fs::path& report) {
  const Config a = load_config(dir_a / kResolvedConfigName);
  const Config b = load_config(dir_b / kResolvedConfigName);
  const std::string sa = run_source(dir_a);
  const std::string sb = run_source(dir_b);
  check_compatible(a, sa, b, sb);

  std::vector<double> times;
  for (double t : a.output.snapshot_times) {
    const auto& tb = b.output.snapshot_times;
    if (std::find(tb.begin(), tb.end(), t) != tb.end() &&
        std::find(times.begin(), times.end(), t) == times.end()) {
      times.push_back(t);
    }
  }
  std::sort(times.begin(), times.end());
  if (times.empty()) throw ConfigError("compare: the runs share no snapshot time");

  const VelocityGrid grid = build_grid(a.params);
  const int M = a.params.M;
  const double hd = grid.cell_volume();
  auto variance = [&](const Config& c, const std::string& src, double mass) {
    if (src != "particles") return 0.0;
    const double p = std::clamp(mass, 0.0, 1.0);
    return p * (1.0 - p) / static_cast<double>(c.particles.N);
  };

  std::vector<CompareRow> rows;
  for (double t : times) {
    const DensitySet fa = read_snapshot(dir_a, sa, t, grid, M);
    const DensitySet fb = read_snapshot(dir_b, sb, t, grid, M);
    for (int m = 1; m <= M; ++m) {
      CompareRow r;
      r.t = t;
      r.m = m;
      const auto x = fa.level(m);
      const auto y = fb.level(m);
      for (std::size_t i = 0; i < x.size(); ++i) r.l1_distance += std::abs(x[i] - y[i]);
      r.l1_distance *= hd;
      r.mass_a = fa.mass(m);
      r.mass_b = fb.mass(m);
      r.mass_diff = r.mass_b - r.mass_a;
      r.std_error = std::sqrt(variance(a, sa, r.mass_a) + variance(b, sb, r.mass_b));
      rows.push_back(r);
    }
  }

  std::string text = "t,m,l1_distance,mass_pde,mass_particles,mass_diff,std_error\n";
  for (const CompareRow& r : rows) {
    text += format_double(r.t) + "," + std::to_string(r.m) + "," + format_double(r.l1_distance) +
            "," + format_double(r.mass_a) + "," + format_double(r.mass_b) + "," +
            format_double(r.mass_diff) + "," + format_double(r.std_error) + "\n";
  }
  if (report.has_parent_path()) prepare_dir(report.parent_path());
  write_text(report, text);
  return rows;
}

}  // namespace smolv
