#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "smolv/density.hpp"
#include "smolv/diagnostics.hpp"
#include "smolv/init.hpp"
#include "smolv/integrator.hpp"
#include "smolv/params.hpp"

namespace smolv {

enum class ParticleMode { MeanField, Spatial };

enum class SweepKind {
  /// Tau-leap over every unordered pair in shuffled order, O(n^2).
  Pairwise,
  /// Mean-field jump process over dt_p with frozen velocities, sampled by
  /// thinning a |v_i - c| + |v_j - c| majorant. O(n log n + events).
  Majorant,
  /// Spatial tau-leap restricted to pairs within epsilon via a cell list.
  CellList,
};

struct ParticleConfig {
  std::size_t N = 1000;
  double epsilon = 0.1;
  ParticleMode mode = ParticleMode::MeanField;
  SweepKind sweep = SweepKind::Majorant;
  /// Constant common-noise fields sigma_k, each with d components.
  std::vector<std::vector<double>> common_noise;
  double mu = 1.0;
  double dt_p = 0.002;

  void validate(const Params& params) const;
};

/// Active particles only; inactive ones are compacted away after each sweep.
struct ParticleState {
  int d = 1;
  std::size_t N = 0;  // initial count, the normalization of empirical measures
  std::vector<double> v;  // n_active * d
  std::vector<double> x;  // n_active * d, spatial mode only
  std::vector<int> m;
  /// Sum of masses of expelled products (integer valued).
  double expelled_mass = 0.0;
  double initial_mass = 0.0;
  std::mt19937_64 rng;
  std::uint64_t steps = 0;

  std::size_t n_active() const { return m.size(); }
  double active_mass() const;
  /// sum_i m_i v_i
  std::vector<double> momentum() const;
};

/// C-infinity radial bump theta(x) = C |x|^2 exp(-1/(1-|x|^2)) on the unit
/// ball, vanishing at the origin, normalized to unit integral, and its
/// rescaling theta_eps(x) = eps^{-d} theta(x/eps).
class Mollifier {
 public:
  Mollifier(int d, double epsilon);
  double operator()(double r) const;
  double max() const { return max_; }
  double epsilon() const { return eps_; }

 private:
  int d_;
  double eps_;
  double norm_;
  double max_;
};

ParticleState sample_initial(const InitSpec& init, const Params& params, std::size_t N,
                             std::uint64_t seed, bool spatial);

/// One Euler-Maruyama step of m dv = alpha m^{1/d}[sqrt(2 mu) dB + sum sigma_k dW^k - v dt]:
///   v += c(m) (-v dt + sqrt(2 mu dt) xi + sum_k sigma_k dW^k)
/// with dW^k shared by all particles. Spatial mode also advances x mod 1.
void em_step(ParticleState& state, const ParticleConfig& config, const Params& params);

struct SweepStats {
  std::size_t merges = 0;
  std::size_t expulsions = 0;
  std::vector<double> momentum_before;
  std::vector<double> momentum_after;
  std::vector<double> expelled_momentum;
  /// Largest |sum m v| change across a single in-system merge.
  double max_merge_momentum_error = 0.0;
};

/// Coagulation over one particle step of length dt_p.
SweepStats coagulation_sweep(ParticleState& state, const ParticleConfig& config,
                             const Params& params, double dt_p);

struct EmpiricalDensity {
  DensitySet f;
  /// Weight per level (index m-1) falling outside the grid, as a fraction of N.
  std::vector<double> out_of_box;
};

/// Cloud-in-cell deposit of weight 1/(N h^d) per active particle.
EmpiricalDensity empirical_density(const ParticleState& state, const VelocityGrid& grid,
                                   int M);

struct ParticleRunOutput {
  std::vector<DiagnosticsRow> rows;
  std::vector<Snapshot> snapshots;
  ParticleState final_state;
  std::size_t merges = 0;
  std::size_t expulsions = 0;
  double max_merge_momentum_error = 0.0;
  /// Largest |sum active m + expelled - initial| seen after any sweep.
  double max_mass_ledger_error = 0.0;
};

ParticleRunOutput run_particles(const Params& params, const ParticleConfig& config,
                                const InitSpec& init, const RunControl& control);

}  // namespace smolv
