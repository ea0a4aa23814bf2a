#pragma once

#include <vector>

#include "smolv/density.hpp"

namespace smolv {

/// A point on a solver trajectory.
struct SolverState {
  double t = 0.0;
  DensitySet f;
  /// Weighted mass carried out of the system by coagulation above M.
  double expelled_cumulative = 0.0;
  /// Weighted (sum_m m * leaked_m) mass lost through the box boundary.
  double leakage_cumulative = 0.0;
};

}  // namespace smolv
