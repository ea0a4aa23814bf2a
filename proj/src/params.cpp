#include "smolv/params.hpp"

#include <cmath>

namespace smolv {

void Params::validate() const {
  if (d < 1 || d > 3) throw ConfigError("model.d must be 1, 2 or 3");
  if (M < 1) throw ConfigError("model.M must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("model.alpha must be > 0");
  if (!(kappa > 0.0)) throw ConfigError("model.kappa must be > 0");
  if (!(mu >= 0.0)) throw ConfigError("model.mu must be >= 0");
  if (!(V > 0.0)) throw ConfigError("grid.V must be > 0");
  if (G < 2) throw ConfigError("grid.G must be >= 2");
  if (!(t_end >= 0.0)) throw ConfigError("time.t_end must be >= 0");
  if (R) {
    if (!(*R > 0.0)) throw ConfigError("truncation.R must be > 0");
    if (*R > V) throw ConfigError("truncation exceeds box: R > V");
  }
}

double stokes_coefficient(int m, const Params& params) {
  if (m < 1 || m > params.M) {
    throw std::domain_error("stokes_coefficient: mass level " + std::to_string(m) +
                            " outside [1, " + std::to_string(params.M) + "]");
  }
  const double d = params.d;
  return params.alpha * std::pow(static_cast<double>(m), (1.0 - d) / d);
}

double cross_section(int n, int m, const Params& params) {
  if (n < 1 || m < 1) throw std::domain_error("cross_section: mass levels must be >= 1");
  const double d = params.d;
  if (params.d == 1) return 1.0;
  const double sum = std::pow(static_cast<double>(n), 1.0 / d) +
                     std::pow(static_cast<double>(m), 1.0 / d);
  return std::pow(sum, d - 1.0);
}

double max_stokes_coefficient(const Params& params) {
  double best = 0.0;
  for (int m = 1; m <= params.M; ++m) best = std::max(best, stokes_coefficient(m, params));
  return best;
}

double min_stokes_coefficient(const Params& params) {
  double best = stokes_coefficient(1, params);
  for (int m = 2; m <= params.M; ++m) best = std::min(best, stokes_coefficient(m, params));
  return best;
}

double default_box_half_width(const Params& params) {
  return std::ceil(8.0 * std::sqrt(params.kappa * max_stokes_coefficient(params)));
}

}  // namespace smolv
