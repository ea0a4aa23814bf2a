#pragma once

#include <optional>
#include <vector>

#include "smolv/density.hpp"
#include "smolv/grid.hpp"
#include "smolv/params.hpp"

namespace smolv {

/// Truncation radius: nullopt means the untruncated kernel.
using Truncation = std::optional<double>;

struct CollisionOutput {
  explicit CollisionOutput(const DensitySet& shape) : Q(shape.grid(), shape.levels()) {}

  /// Rate of change of each f_m.
  DensitySet Q;
  /// Weighted mass per unit time carried by pairs whose product exceeds M.
  double expelled_mass_rate = 0.0;
  /// Momentum per unit time carried out by the same pairs (d components).
  std::vector<double> expelled_momentum_rate;
  /// Total coagulation event rate over ordered level pairs.
  double pair_flux_total = 0.0;
};

struct GainResult {
  explicit GainResult(const DensitySet& shape) : gain(shape.grid(), shape.levels()) {}

  DensitySet gain;
  /// Number rate deposited into each level (index m-1).
  std::vector<double> deposited_number_rate;
};

/// L_m(v_a) = 2 sum_n s(n,m) f_m(v_a) sum_b g_n(v_b) |v_a - v_b| h^d, with
/// chi_R(v_a) chi_R(v_b) inserted for finite R. The one-argument form uses g = f.
DensitySet loss_field(const DensitySet& f, const Params& params, Truncation R = {});
DensitySet loss_field(const DensitySet& f, const DensitySet& g, const Params& params,
                      Truncation R = {});

/// Gain by pair deposition. Every ordered level pair (n,k) with n+k <= M and
/// every ordered cell pair (a,b) carries flux s(n,k) f_n(a) g_k(b) |v_a-v_b| h^{2d}
/// to the merge velocity (n v_a + k v_b)/(n+k), spread over the 2^d
/// surrounding cells with cloud-in-cell weights.
GainResult gain_deposit(const DensitySet& f, const Params& params, Truncation R = {});
GainResult gain_deposit(const DensitySet& f, const DensitySet& g, const Params& params,
                        Truncation R = {});

/// Q(f,f) = gain - loss together with the expelled-mass bookkeeping.
///
/// Ordered pairs with n+k > M remove both reactants; their weighted mass
/// (n+k) F is reported as expelled, so that
///   sum_m m <Q_m> + expelled_mass_rate = 0
/// holds up to round-off.
CollisionOutput collision_operator(const DensitySet& f, const Params& params,
                                   Truncation R = {});

/// Bilinear Q(f,g): gain from f_n(a) g_k(b), loss f_m(v) g_n(w).
DensitySet collision_fields(const DensitySet& f, const DensitySet& g, const Params& params,
                            Truncation R = {});

/// Per-density loss rate lambda_m(v_a) = 2 sum_n s(n,m) sum_b f_n(b)|v_a-v_b| h^d,
/// laid out like a DensitySet.
DensitySet loss_rate_coefficients(const DensitySet& f, const Params& params,
                                  Truncation R = {});

/// ||Q(f,f)||_{p,M,k} / (||f||_{p,M,k+1} ||f||_{1,M,k+1}).
double nonlinearity_bound_ratio(const DensitySet& f, const Params& params,
                                WeightedNormSpec spec, Truncation R = {});

}  // namespace smolv
