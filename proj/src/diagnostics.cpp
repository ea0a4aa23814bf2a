#include "smolv/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace smolv {

double gradient_energy(std::span<const double> field, const VelocityGrid& grid) {
  const int d = grid.dim();
  const int G = grid.cells_per_axis();
  const double h = grid.spacing();
  double total = 0.0;
  for (std::size_t a = 0; a < field.size(); ++a) {
    const auto idx = grid.multi_index(a);
    double g2 = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      const std::size_t s = grid.stride(ax);
      const int i = idx[ax];
      double g;
      if (i > 0 && i < G - 1) {
        g = (field[a + s] - field[a - s]) / (2.0 * h);
      } else if (G >= 3 && i == 0) {
        g = (-3.0 * field[a] + 4.0 * field[a + s] - field[a + 2 * s]) / (2.0 * h);
      } else if (G >= 3) {
        g = (3.0 * field[a] - 4.0 * field[a - s] + field[a - 2 * s]) / (2.0 * h);
      } else {
        g = i == 0 ? (field[a + s] - field[a]) / h : (field[a] - field[a - s]) / h;
      }
      g2 += g * g;
    }
    total += g2;
  }
  return total * grid.cell_volume();
}

DiagnosticsRow compute_row(const SolverState& state, const DensitySet* reference,
                           const DiagnosticsOptions& options) {
  const DensitySet& f = state.f;
  const VelocityGrid& grid = f.grid();
  const int M = f.levels();
  const int d = grid.dim();
  const double hd = grid.cell_volume();

  DiagnosticsRow row;
  row.t = state.t;
  row.expelled = state.expelled_cumulative;
  row.leakage = state.leakage_cumulative;
  row.mass.assign(M, 0.0);
  row.momentum.assign(d, 0.0);
  row.weighted_l2_powers = options.weighted_l2_powers;
  row.weighted_l2.assign(options.weighted_l2_powers.size(), 0.0);

  for (int m = 1; m <= M; ++m) {
    auto fm = f.level(m);
    row.mass[m - 1] = f.mass(m);
    double l2 = 0.0;
    for (std::size_t a = 0; a < fm.size(); ++a) {
      const double x = fm[a];
      if (x == 0.0) continue;
      const double speed = std::sqrt(grid.speed_sq(a));
      double pw = 1.0;
      for (int k = 0; k <= kMaxMoment; ++k) {
        row.moment_k[k] += pw * x;
        pw *= speed;
      }
      for (int ax = 0; ax < d; ++ax) row.momentum[ax] += m * grid.center(a, ax) * x;
      l2 += x * x;
      for (std::size_t j = 0; j < options.weighted_l2_powers.size(); ++j) {
        row.weighted_l2[j] +=
            x * x * std::pow(grid.bracket(a), 2 * options.weighted_l2_powers[j]);
      }
    }
    row.l2_energy += l2 * hd;
    row.h1_seminorm += gradient_energy(fm, grid);
  }
  for (double& x : row.moment_k) x *= hd;
  for (double& x : row.momentum) x *= hd;
  for (double& x : row.weighted_l2) x *= hd;
  row.moment2 = 0.0;
  for (int m = 1; m <= M; ++m) {
    double s = 0.0;
    auto fm = f.level(m);
    for (std::size_t a = 0; a < fm.size(); ++a) s += grid.speed_sq(a) * fm[a];
    row.moment2 += s * hd;
  }
  row.T = 0.0;
  for (int m = 1; m <= M; ++m) row.T += m * row.mass[m - 1];
  if (reference) row.dist_ref = weighted_l1_distance(f, *reference, 2);
  return row;
}

double weighted_l1_distance(const DensitySet& f, const DensitySet& g, int k) {
  if (!f.grid().same_as(g.grid()) || f.levels() != g.levels()) {
    throw std::invalid_argument("weighted_l1_distance: grid or level mismatch");
  }
  const VelocityGrid& grid = f.grid();
  double s = 0.0;
  for (int m = 1; m <= f.levels(); ++m) {
    auto fm = f.level(m);
    auto gm = g.level(m);
    for (std::size_t a = 0; a < fm.size(); ++a) {
      s += std::abs(fm[a] - gm[a]) * std::pow(grid.bracket(a), k);
    }
  }
  return s * grid.cell_volume();
}

}  // namespace smolv
