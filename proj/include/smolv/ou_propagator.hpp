#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "smolv/grid.hpp"

namespace smolv {

/// One step of d/dt f = c div(v f) + kappa c^2 Lap f.
struct OUStepSpec {
  double tau = 0.0;
  double c = 1.0;
  double kappa = 1.0;
};

/// sigma^2(tau) = kappa c (1 - exp(-2 c tau)), the per-axis variance a point
/// mass acquires over one step.
double ou_variance(const OUStepSpec& spec);

/// Smallest step whose blur is resolved by the grid (sigma >= h/2). Returns
/// +inf when even the stationary variance kappa*c is below (h/2)^2.
double ou_min_resolved_tau(double c, double kappa, double h);

/// The blur of a step is narrower than half a cell. Sub-cycling cannot fix
/// this (it shrinks sigma further); the caller must lengthen the OU interval
/// to at least `min_tau()` and sub-cycle whatever else shares the step.
class StepRefused : public std::runtime_error {
 public:
  StepRefused(const std::string& what, double min_tau, long min_substeps)
      : std::runtime_error(what), min_tau_(min_tau), min_substeps_(min_substeps) {}
  double min_tau() const { return min_tau_; }
  /// Factor by which the step must grow, i.e. how many sub-steps of the
  /// refused length one resolved OU step has to cover.
  long min_substeps() const { return min_substeps_; }

 private:
  double min_tau_;
  long min_substeps_;
};

struct OUStepResult {
  std::vector<double> field;
  /// Integral of the density carried past the box boundary.
  double leaked_mass = 0.0;
};

/// Exact-in-law OU step on the grid.
///
/// Each cell's content moves to N(exp(-c tau) v_a, sigma^2 I), applied as a
/// separable per-axis transition kernel tabulated on the (infinite) lattice,
/// truncated at 8 sigma and normalized to unit discrete mass there. Weight
/// landing outside the box is reported as leakage. Nonnegative input gives
/// nonnegative output.
OUStepResult ou_step(std::span<const double> field, const OUStepSpec& spec,
                     const VelocityGrid& grid, bool waive_resolution = false);

}  // namespace smolv
