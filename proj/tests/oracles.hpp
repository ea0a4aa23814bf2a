// Independent reference computations used as test oracles.
#pragma once

#include <cstdint>
#include <vector>

#include "smolv/collision.hpp"
#include "smolv/density.hpp"
#include "smolv/params.hpp"

namespace smolv::oracle {

/// Q(f,f) by a direct gather: for every target cell, loop over all source
/// pairs and weight by the floating-point cloud-in-cell kernel of the merge
/// velocity. O(M^2 G^{3d}), only for tiny grids.
DensitySet collision_gather(const DensitySet& f, const Params& params, Truncation R = {});

/// Expelled weighted-mass rate by a direct double loop over cell pairs.
double expelled_rate_direct(const DensitySet& f, const Params& params, Truncation R = {});

/// Closed-form OU law of one axis after time tau from N(mean0, var0).
struct OUMoments {
  double mean;
  double var;
};
OUMoments ou_moments(double mean0, double var0, double c, double kappa, double tau);

/// Per-axis mean and variance of one level of a density (discrete quadrature).
OUMoments field_moments(const DensitySet& f, int m, int axis);

/// M=2 (or M=1) two-bump state on a d=1 grid with cells at v=+-1:
/// f_1 = 0.5/h at the cells containing -1 and +1, everything else zero.
DensitySet two_bump(const VelocityGrid& grid, int M);

/// L1 distances between `f` and the CIC deposit of round(N * number(f))
/// i.i.d. samples from it, each of weight 1/N (cell drawn by mass, position
/// uniform inside the cell), one per seed.
std::vector<double> sampling_noise_l1(const DensitySet& f, std::size_t N,
                                      const std::vector<std::uint64_t>& seeds);

}  // namespace smolv::oracle
