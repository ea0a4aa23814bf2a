#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "smolv/config.hpp"
#include "smolv/integrator.hpp"
#include "smolv/particles.hpp"

namespace smolv {

inline constexpr const char* kResolvedConfigName = "config.resolved.ini";
inline constexpr const char* kDiagnosticsName = "diagnostics.csv";

/// Runs the PDE solver and writes config.resolved.ini, diagnostics.csv and
/// snapshot_pde_* files into `dir` (created if needed).
RunOutput solve_command(const Config& config, const std::filesystem::path& dir);

/// Runs the particle system; same directory layout with snapshot_particles_*.
ParticleRunOutput particles_command(const Config& config, const std::filesystem::path& dir);

struct SweepRow {
  std::string kappa_label;
  double kappa = 0.0;
  double expelled_at_tend = 0.0;
  double T_final = 0.0;
};

/// One solve per kappa in `dir`/kappa_<label>, with V re-derived per kappa
/// when the base config left it on auto, plus `dir`/summary.csv.
std::vector<SweepRow> sweep_command(const Config& base, const std::vector<std::string>& kappas,
                                    const std::filesystem::path& dir);

struct CompareRow {
  double t = 0.0;
  int m = 0;
  double l1_distance = 0.0;  // sum_a |f_a - g_a| h^d
  double mass_a = 0.0;
  double mass_b = 0.0;
  double mass_diff = 0.0;  // mass_b - mass_a
  /// Binomial standard error of the level mass from the particle side(s).
  double std_error = 0.0;
};

/// "pde" or "particles", from the snapshot files present in a run directory.
std::string run_source(const std::filesystem::path& dir);

/// Compares every snapshot time shared by two run directories level by level
/// and writes report.csv (t,m,l1_distance,mass_pde,mass_particles,mass_diff,std_error).
/// The configs must agree on d, M, alpha, V, G, t_end and init, the particle
/// side must be mean-field without common noise, and the velocity
/// diffusivities (kappa for the PDE, mu for particles) must be equal.
std::vector<CompareRow> compare_command(const std::filesystem::path& dir_a,
                                        const std::filesystem::path& dir_b,
                                        const std::filesystem::path& report);

}  // namespace smolv
