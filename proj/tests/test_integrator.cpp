#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "oracles.hpp"
#include "smolv/init.hpp"
#include "smolv/integrator.hpp"
#include "smolv/parallel.hpp"
#include "support.hpp"

using namespace smolv;

namespace {

Params small_params() {
  Params p = testing::desk_params(1, 3, 64, 6.0);
  p.t_end = 0.3;
  p.dt = 0.02;
  return p;
}

DensitySet small_initial(const Params& p) {
  InitSpec init;
  init.levels.resize(3);
  init.levels[0] = {0.6, {{1.0, {0.5}, {1.0}}}};
  init.levels[1] = {0.3, {{0.5, {-1.0}, {0.5}}, {0.5, {1.0}, {0.5}}}};
  init.levels[2] = {0.1, {{1.0, {0.0}, {2.0}}}};
  return discretize_initial(init, build_grid(p), p.M);
}

}  // namespace

TEST_CASE("stability_dt of an empty state is the cap") {
  const Params p = small_params();
  CHECK(stability_dt(DensitySet(build_grid(p), 3), p, 0.7) == 0.7);
}

TEST_CASE("a step beyond the collision bound is refused unless sub-cycled") {
  Params p = testing::desk_params(1, 1, 5, 2.5);
  const VelocityGrid g = build_grid(p);
  const SolverState s{0.0, oracle::two_bump(g, 1), 0.0, 0.0};
  StepOptions opts;
  opts.waive_ou_resolution = true;
  try {
    strang_step(s, 0.5, p, opts);
    FAIL("expected refusal");
  } catch (const StabilityRefused& e) {
    // The bound is taken after the first OU half-step has spread the bumps.
    CHECK(e.bound() < 0.5);
    CHECK(e.bound() > 0.0);
  }
  opts.subcycle_collision = true;
  StepInfo info;
  const SolverState next = strang_step(s, 0.5, p, opts, &info);
  CHECK(info.collision_substeps >= 2);
  CHECK(next.t == 0.5);
  CHECK(info.min_before_clip >= -kNegativityTolerance);
  for (double x : next.f.data()) CHECK(x >= 0.0);
}

TEST_CASE("strang step closes the weighted-mass ledger") {
  const Params p = small_params();
  const DensitySet f0 = small_initial(p);
  SolverState s{0.0, f0, 0.0, 0.0};
  const double T0 = f0.weighted_mass();
  StepOptions opts;
  opts.subcycle_collision = true;
  for (int k = 0; k < 5; ++k) {
    s = strang_step(s, 0.02, p, opts);
    CHECK(std::abs(T0 - s.f.weighted_mass() - s.expelled_cumulative - s.leakage_cumulative) <=
          1e-12 * T0);
  }
  CHECK(s.expelled_cumulative > 0.0);
  CHECK(s.t == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("run emits rows at the output cadence and snapshots at requested times") {
  const Params p = small_params();
  RunControl control;
  control.output_every = 0.1;
  control.snapshot_times = {0.0, 0.15, 0.3};
  const RunOutput out = run(p, small_initial(p), control);
  REQUIRE(out.rows.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(out.rows[k].t == doctest::Approx(0.1 * k).epsilon(1e-12));
  CHECK(out.rows.back().t == p.t_end);
  REQUIRE(out.snapshots.size() == 3);
  CHECK(out.snapshots[1].t == 0.15);
  CHECK(out.final_state.t == p.t_end);
  CHECK(out.min_before_clip >= -kNegativityTolerance);
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    CHECK(out.rows[k].T <= out.rows[k - 1].T);
    const double gap = out.rows[0].T - out.rows[k].T - out.rows[k].expelled - out.rows[k].leakage;
    CHECK(std::abs(gap) <= 1e-8 * out.rows[0].T);
  }
  CHECK(out.rows[0].dist_ref == 0.0);
  CHECK(out.rows.back().dist_ref > 0.0);
}

TEST_CASE("number of particles is non-increasing and the second moment stays bounded") {
  const Params p = small_params();
  const RunOutput out = run(p, small_initial(p), {});
  const double cmin = min_stokes_coefficient(p), cmax = max_stokes_coefficient(p);
  const double A0 = out.rows[0].moment_k[0], A2 = out.rows[0].moment2;
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    CHECK(out.rows[k].moment_k[0] <= out.rows[k - 1].moment_k[0]);
    const double t = out.rows[k].t;
    const double decay = std::exp(-2.0 * cmin * t);
    const double envelope = A2 * decay + p.d * p.kappa * cmax * cmax / cmin * A0 * (1.0 - decay);
    CHECK(out.rows[k].moment2 <= envelope);
  }
}

TEST_CASE("zero final time yields only the initial row") {
  Params p = small_params();
  p.t_end = 0.0;
  const RunOutput out = run(p, small_initial(p), {});
  REQUIRE(out.rows.size() == 1);
  CHECK(out.steps == 0);
}

TEST_CASE("auto dt and invalid controls") {
  Params p = small_params();
  p.dt = 0.0;
  const DensitySet f0 = small_initial(p);
  const double dt = auto_dt(f0, p);
  CHECK(dt > 0.0);
  CHECK(dt <= 0.05);
  CHECK_NOTHROW(run(p, f0, {}));
  RunControl bad;
  bad.snapshot_times = {0.5};
  CHECK_THROWS_AS(run(p, f0, bad), ConfigError);
  bad.snapshot_times.clear();
  bad.output_every = 0.0;
  CHECK_THROWS_AS(run(p, f0, bad), ConfigError);
  Params other = p;
  other.M = 2;
  CHECK_THROWS_AS(run(other, f0, {}), std::invalid_argument);
}

TEST_CASE("deterministic mode is bit-identical across thread counts") {
  const Params p = small_params();
  const DensitySet f0 = small_initial(p);
  set_deterministic(true);
  setenv("SMOLV_NUM_THREADS", "1", 1);
  const RunOutput a = run(p, f0, {});
  setenv("SMOLV_NUM_THREADS", "3", 1);
  const RunOutput b = run(p, f0, {});
  unsetenv("SMOLV_NUM_THREADS");
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].T == b.rows[k].T);
    CHECK(a.rows[k].moment2 == b.rows[k].moment2);
    CHECK(a.rows[k].expelled == b.rows[k].expelled);
  }
  CHECK(testing::max_abs_diff(a.final_state.f, b.final_state.f) == 0.0);
}
