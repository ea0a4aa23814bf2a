// Shared fixtures for the unit tests.
#pragma once

#include <cmath>
#include <random>

#include "smolv/density.hpp"
#include "smolv/grid.hpp"
#include "smolv/params.hpp"

namespace smolv::testing {

inline Params desk_params(int d, int M, int G, double V) {
  Params p;
  p.d = d;
  p.M = M;
  p.G = G;
  p.V = V;
  p.kappa = 1.0;
  p.alpha = 1.0;
  return p;
}

/// Uniform random values in [0, 1) with roughly a third of the cells zeroed.
inline DensitySet random_density(const VelocityGrid& grid, int M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DensitySet f(grid, M);
  for (double& x : f.data()) {
    const double r = u(rng);
    x = r < 0.3 ? 0.0 : u(rng);
  }
  return f;
}

inline DensitySet gaussian_density(const VelocityGrid& grid, int M, int level, double mean,
                                   double var, double mass) {
  DensitySet f(grid, M);
  auto fm = f.level(level);
  for (std::size_t a = 0; a < grid.size(); ++a) {
    double e = 0.0;
    for (int ax = 0; ax < grid.dim(); ++ax) {
      const double z = grid.center(a, ax) - mean;
      e += z * z;
    }
    fm[a] = std::exp(-0.5 * e / var);
  }
  const double s = mass / f.mass(level);
  for (double& x : fm) x *= s;
  return f;
}

inline double l1(const DensitySet& f, const DensitySet& g) {
  double s = 0.0;
  auto a = f.data();
  auto b = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * f.grid().cell_volume();
}

inline double max_abs_diff(const DensitySet& f, const DensitySet& g) {
  double s = 0.0;
  auto a = f.data();
  auto b = g.data();
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace smolv::testing
