#pragma once

#include <vector>

#include "smolv/density.hpp"
#include "smolv/grid.hpp"

namespace smolv {

struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;  // d entries
  std::vector<double> var;   // diagonal covariance, d entries
};

/// f0_m = r(m) g_m with g_m a Gaussian mixture in velocity.
struct LevelInit {
  double r = 0.0;
  std::vector<GaussianComponent> components;
};

struct InitSpec {
  std::vector<LevelInit> levels;  // index m-1

  /// Checks r >= 0 summing to 1 within 1e-12, per-level component weights
  /// summing to 1 within 1e-12, positive variances, and matching dimensions.
  void validate(int d, int M) const;
};

/// Standard normal N(0, var) on every level-1 particle, nothing elsewhere.
InitSpec gaussian_on_level_one(int d, int M, double var = 1.0);

/// Samples the mixture density on cell centers and rescales each level so its
/// discrete mass equals r(m) exactly.
DensitySet discretize_initial(const InitSpec& init, const VelocityGrid& grid, int M);

}  // namespace smolv
