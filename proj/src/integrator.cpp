#include "smolv/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smolv/ou_propagator.hpp"

namespace smolv {

namespace {

double min_value(const DensitySet& f) {
  double lo = 0.0;
  for (double x : f.data()) lo = std::min(lo, x);
  return lo;
}

void ou_half(SolverState& state, double tau, const Params& params, bool waive) {
  if (tau <= 0.0) return;
  for (int m = 1; m <= params.M; ++m) {
    const OUStepSpec spec{tau, stokes_coefficient(m, params), params.kappa};
    auto level = state.f.level(m);
    OUStepResult r = ou_step(level, spec, state.f.grid(), waive);
    std::copy(r.field.begin(), r.field.end(), level.begin());
    state.leakage_cumulative += m * r.leaked_mass;
  }
}

struct HeunResult {
  DensitySet f;
  double expelled;
  double min_before_clip;
  double clipped;
};

// One SSP-RK2 collision sub-step of length h. Both stages are forward-Euler
// steps, so with h <= stability_dt the result stays nonnegative.
HeunResult heun(const DensitySet& f, double h, const Params& params) {
  const CollisionOutput q1 = collision_operator(f, params, params.R);
  DensitySet f1 = f;
  {
    auto a = f1.data();
    auto q = q1.Q.data();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += h * q[i];
  }
  double lo = min_value(f1);
  double clipped = f1.clip_roundoff();
  const CollisionOutput q2 = collision_operator(f1, params, params.R);
  DensitySet out = f;
  {
    auto o = out.data();
    auto a1 = f1.data();
    auto q = q2.Q.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.5 * o[i] + 0.5 * (a1[i] + h * q[i]);
  }
  lo = std::min(lo, min_value(out));
  clipped += out.clip_roundoff();
  const double expelled = 0.5 * h * (q1.expelled_mass_rate + q2.expelled_mass_rate);
  return {std::move(out), expelled, lo, clipped};
}

}  // namespace

double stability_dt(const DensitySet& f, const Params& params, double dt_max) {
  const DensitySet rate = loss_rate_coefficients(f, params, params.R);
  double worst = 0.0;
  auto fv = f.data();
  auto rv = rate.data();
  for (std::size_t i = 0; i < fv.size(); ++i) {
    if (fv[i] > 0.0) worst = std::max(worst, rv[i]);
  }
  if (!(worst > 0.0)) return dt_max;
  return std::min(dt_max, 0.5 / worst);
}

SolverState strang_step(const SolverState& state, double dt, const Params& params,
                        const StepOptions& options, StepInfo* info) {
  if (!(dt > 0.0)) throw std::invalid_argument("strang_step: dt must be > 0");
  SolverState next = state;
  StepInfo local;

  ou_half(next, 0.5 * dt, params, options.waive_ou_resolution);

  double remaining = dt;
  while (remaining > 0.0) {
    const double bound = stability_dt(next.f, params, std::numeric_limits<double>::infinity());
    double h = remaining;
    if (h > bound * (1.0 + 1e-12)) {
      if (!options.subcycle_collision) {
        std::ostringstream os;
        os << "strang_step refused: dt=" << dt << " exceeds collision stability bound "
           << bound;
        throw StabilityRefused(os.str(), bound);
      }
      h = bound;
      // Avoid a sliver at the end of the interval.
      if (remaining - h < 0.25 * h) h = 0.5 * remaining;
    }
    HeunResult r = heun(next.f, h, params);
    next.f = std::move(r.f);
    next.expelled_cumulative += r.expelled;
    local.min_before_clip = std::min(local.min_before_clip, r.min_before_clip);
    local.clipped += r.clipped;
    ++local.collision_substeps;
    remaining = (h == remaining) ? 0.0 : remaining - h;
  }

  ou_half(next, 0.5 * dt, params, options.waive_ou_resolution);
  next.t = state.t + dt;
  if (info) *info = local;
  return next;
}

double auto_dt(const DensitySet& initial, const Params& params) {
  return stability_dt(initial, params, 0.05);
}

RunOutput run(const Params& params, const DensitySet& initial, const RunControl& control) {
  params.validate();
  if (!(control.output_every > 0.0)) throw ConfigError("output.every must be > 0");
  if (initial.levels() != params.M || initial.grid().dim() != params.d) {
    throw std::invalid_argument("run: initial data does not match params");
  }
  initial.check_valid();

  const double t_end = params.t_end;
  std::vector<double> output_times;
  for (long k = 0;; ++k) {
    const double t = k * control.output_every;
    if (t > t_end * (1.0 + 1e-12)) break;
    output_times.push_back(std::min(t, t_end));
  }
  if (output_times.back() < t_end) output_times.push_back(t_end);
  for (double t : control.snapshot_times) {
    if (t < 0.0 || t > t_end * (1.0 + 1e-12)) {
      throw ConfigError("snapshot time outside [0, t_end]");
    }
  }
  std::vector<double> breaks = output_times;
  for (double t : control.snapshot_times) breaks.push_back(std::min(t, t_end));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto is_in = [](const std::vector<double>& v, double t) {
    return std::find(v.begin(), v.end(), t) != v.end();
  };
  std::vector<double> snaps = control.snapshot_times;
  for (double& t : snaps) t = std::min(t, t_end);

  const double dt_cfg = params.dt > 0.0 ? params.dt : auto_dt(initial, params);
  const double h = initial.grid().spacing();
  double tau_min = 0.0;
  for (int m = 1; m <= params.M; ++m) {
    tau_min = std::max(tau_min,
                       ou_min_resolved_tau(stokes_coefficient(m, params), params.kappa, h));
  }

  RunOutput out{{}, {}, SolverState{0.0, initial, 0.0, 0.0}};
  SolverState& state = out.final_state;
  const DensitySet reference = initial;

  auto emit = [&](double t) {
    state.t = t;
    if (is_in(output_times, t)) out.rows.push_back(compute_row(state, &reference, control.diagnostics));
    if (is_in(snaps, t)) out.snapshots.push_back({t, state.f});
  };
  emit(0.0);

  for (std::size_t b = 1; b < breaks.size(); ++b) {
    const double t0 = breaks[b - 1];
    const double t1 = breaks[b];
    const double L = t1 - t0;
    long n = std::max(1L, static_cast<long>(std::ceil(L / dt_cfg - 1e-9)));
    StepOptions opts;
    opts.subcycle_collision = true;
    if (0.5 * L / n < tau_min) {
      n = std::max(1L, static_cast<long>(std::floor(0.5 * L / tau_min)));
      opts.waive_ou_resolution = 0.5 * L / n < tau_min;
    }
    const double dt = L / n;
    for (long i = 0; i < n; ++i) {
      StepInfo info;
      state = strang_step(state, dt, params, opts, &info);
      ++out.steps;
      out.collision_substeps += info.collision_substeps;
      out.min_before_clip = std::min(out.min_before_clip, info.min_before_clip);
    }
    emit(t1);
  }
  return out;
}

}  // namespace smolv
