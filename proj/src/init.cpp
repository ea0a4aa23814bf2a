#include "smolv/init.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "smolv/params.hpp"

namespace smolv {

void InitSpec::validate(int d, int M) const {
  if (static_cast<int>(levels.size()) != M) {
    throw ConfigError("init: expected " + std::to_string(M) + " levels, got " +
                      std::to_string(levels.size()));
  }
  double total = 0.0;
  for (std::size_t m = 0; m < levels.size(); ++m) {
    const LevelInit& lvl = levels[m];
    const std::string where = "init level " + std::to_string(m + 1);
    if (!(lvl.r >= 0.0)) throw ConfigError(where + ": r must be >= 0");
    total += lvl.r;
    if (lvl.r > 0.0 && lvl.components.empty()) {
      throw ConfigError(where + ": r > 0 but no velocity distribution given");
    }
    if (lvl.components.empty()) continue;
    double wsum = 0.0;
    for (const GaussianComponent& c : lvl.components) {
      if (!(c.weight >= 0.0)) throw ConfigError(where + ": component weight must be >= 0");
      if (static_cast<int>(c.mean.size()) != d || static_cast<int>(c.var.size()) != d) {
        throw ConfigError(where + ": mean/var must have " + std::to_string(d) + " entries");
      }
      for (double v : c.var) {
        if (!(v > 0.0)) throw ConfigError(where + ": variances must be > 0");
      }
      wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12) {
      throw ConfigError(where + ": component weights must sum to 1");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("init: r(m) must sum to 1");
}

InitSpec gaussian_on_level_one(int d, int M, double var) {
  InitSpec init;
  init.levels.resize(M);
  init.levels[0].r = 1.0;
  init.levels[0].components.push_back(
      {1.0, std::vector<double>(d, 0.0), std::vector<double>(d, var)});
  return init;
}

DensitySet discretize_initial(const InitSpec& init, const VelocityGrid& grid, int M) {
  const int d = grid.dim();
  init.validate(d, M);
  DensitySet f(grid, M);
  for (int m = 1; m <= M; ++m) {
    const LevelInit& lvl = init.levels[m - 1];
    if (lvl.r == 0.0) continue;
    auto fm = f.level(m);
    for (std::size_t a = 0; a < grid.size(); ++a) {
      double value = 0.0;
      for (const GaussianComponent& c : lvl.components) {
        double expo = 0.0;
        double norm = 1.0;
        for (int ax = 0; ax < d; ++ax) {
          const double z = grid.center(a, ax) - c.mean[ax];
          expo += z * z / c.var[ax];
          norm *= 2.0 * std::numbers::pi * c.var[ax];
        }
        value += c.weight * std::exp(-0.5 * expo) / std::sqrt(norm);
      }
      fm[a] = value;
    }
    const double mass = f.mass(m);
    if (!(mass > 0.0)) throw ConfigError("init: level " + std::to_string(m) +
                                         " has no mass on the grid");
    const double scale = lvl.r / mass;
    for (double& x : fm) x *= scale;
  }
  return f;
}

}  // namespace smolv
