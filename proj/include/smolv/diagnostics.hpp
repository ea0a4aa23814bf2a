#pragma once

#include <array>
#include <vector>

#include "smolv/density.hpp"
#include "smolv/params.hpp"
#include "smolv/state.hpp"

namespace smolv {

inline constexpr int kMaxMoment = 6;

/// One time sample of the monitored functionals.
struct DiagnosticsRow {
  double t = 0.0;
  std::vector<double> mass;  // index m-1
  double T = 0.0;            // sum_m m * mass[m]
  double expelled = 0.0;
  double leakage = 0.0;
  std::vector<double> momentum;  // sum_m m int v f_m, d components
  double moment2 = 0.0;          // sum_m int |v|^2 f_m
  std::array<double, kMaxMoment + 1> moment_k{};  // sum_m int |v|^k f_m
  double l2_energy = 0.0;        // sum_m int f_m^2
  double h1_seminorm = 0.0;      // sum_m int |grad f_m|^2
  std::vector<int> weighted_l2_powers;
  std::vector<double> weighted_l2;  // sum_m int f_m^2 <v>^{2k}
  double dist_ref = 0.0;         // weighted L1(<v>^2) distance to the reference state
};

struct DiagnosticsOptions {
  std::vector<int> weighted_l2_powers{1, 2};
};

/// Computes every functional by midpoint quadrature; the gradient uses
/// second-order central differences with one-sided stencils at the box edge.
/// `reference` (may be null) feeds dist_ref.
DiagnosticsRow compute_row(const SolverState& state, const DensitySet* reference = nullptr,
                           const DiagnosticsOptions& options = {});

/// sum_m sum_a |f_m - g_m| <v_a>^k h^d
double weighted_l1_distance(const DensitySet& f, const DensitySet& g, int k);

/// sum_a |grad_h f|^2 h^d for one grid field.
double gradient_energy(std::span<const double> field, const VelocityGrid& grid);

}  // namespace smolv
