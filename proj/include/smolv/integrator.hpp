#pragma once

#include <stdexcept>
#include <vector>

#include "smolv/collision.hpp"
#include "smolv/diagnostics.hpp"
#include "smolv/params.hpp"
#include "smolv/state.hpp"

namespace smolv {

/// Requested step exceeds the explicit collision stability bound.
class StabilityRefused : public std::runtime_error {
 public:
  StabilityRefused(const std::string& what, double bound)
      : std::runtime_error(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

/// dt* = 0.5 / max lambda_m(v_a) over occupied cells, where lambda is the
/// per-density loss rate. Returns dt_max when nothing is occupied or the
/// rate vanishes. A forward-Euler collision step of length <= dt* keeps every
/// cell at or above half its value.
double stability_dt(const DensitySet& f, const Params& params, double dt_max);

struct StepInfo {
  int collision_substeps = 0;
  /// Smallest value seen before round-off clipping.
  double min_before_clip = 0.0;
  double clipped = 0.0;
};

struct StepOptions {
  /// Split the collision stage into sub-steps bounded by stability_dt instead
  /// of refusing a step that exceeds it.
  bool subcycle_collision = false;
  /// Allow OU half-steps whose blur is narrower than h/2.
  bool waive_ou_resolution = false;
};

/// Strang step: OU(dt/2) per level, collision over dt (Heun, i.e. the average
/// of two forward-Euler stages), OU(dt/2). Tallies expelled mass and
/// m-weighted boundary leakage.
SolverState strang_step(const SolverState& state, double dt, const Params& params,
                        const StepOptions& options = {}, StepInfo* info = nullptr);

struct Snapshot {
  double t = 0.0;
  DensitySet f;
};

struct RunControl {
  double output_every = 0.1;
  std::vector<double> snapshot_times;
  DiagnosticsOptions diagnostics;
};

struct RunOutput {
  std::vector<DiagnosticsRow> rows;
  std::vector<Snapshot> snapshots;
  SolverState final_state;
  long steps = 0;
  long collision_substeps = 0;
  double min_before_clip = 0.0;
};

/// Step size used when Params::dt is "auto" (<= 0).
double auto_dt(const DensitySet& initial, const Params& params);

/// Integrates from `initial` at t=0 to params.t_end. Steps are equal within
/// each interval between consecutive output/snapshot times, at most
/// params.dt long, lengthened when needed so every OU half-step is resolved;
/// the collision stage is sub-cycled to respect stability_dt.
RunOutput run(const Params& params, const DensitySet& initial, const RunControl& control);

}  // namespace smolv
