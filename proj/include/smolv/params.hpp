#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace smolv {

/// Raised for any configuration or parameter invariant violation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical and numerical configuration shared by the solver and the particle
/// simulator.
///
/// `dt <= 0` means "auto" (see integrator). `R` unset means no truncation.
struct Params {
  int d = 1;
  int M = 1;
  double alpha = 1.0;  // Stokes coefficient
  double kappa = 1.0;  // velocity diffusivity of the PDE
  double mu = 0.0;     // molecular diffusivity (particles)
  double V = 8.0;      // velocity box half-width
  int G = 256;         // cells per axis
  double dt = 0.01;
  double t_end = 1.0;
  std::optional<double> R;
  std::uint64_t seed = 0;

  void validate() const;
};

/// c(m) = alpha * m^{(1-d)/d}.
double stokes_coefficient(int m, const Params& params);

/// s(n,m) = (n^{1/d} + m^{1/d})^{d-1}.
double cross_section(int n, int m, const Params& params);

/// Largest c(m) over the mass levels.
double max_stokes_coefficient(const Params& params);
double min_stokes_coefficient(const Params& params);

/// Default box half-width: 8 * sqrt(kappa * max_m c(m)), rounded up to an
/// integer. Stationary Gaussian tails at the boundary are then below 1e-12.
double default_box_half_width(const Params& params);

}  // namespace smolv
