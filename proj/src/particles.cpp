#include "smolv/particles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace smolv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::size_t kNoiseChunk = 8192;
constexpr double kMaxPairProbability = 0.1;

double max_cross_section(const Params& params) {
  double best = 0.0;
  for (int n = 1; n <= params.M; ++n) {
    for (int k = 1; k <= params.M; ++k) best = std::max(best, cross_section(n, k, params));
  }
  return best;
}

double torus_distance(const double* xi, const double* xj, int d) {
  double s = 0.0;
  for (int ax = 0; ax < d; ++ax) {
    double dx = xi[ax] - xj[ax];
    dx -= std::round(dx);
    s += dx * dx;
  }
  return std::sqrt(s);
}

double velocity_distance(const ParticleState& st, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (int ax = 0; ax < st.d; ++ax) {
    const double dv = st.v[i * st.d + ax] - st.v[j * st.d + ax];
    s += dv * dv;
  }
  return std::sqrt(s);
}

// Fenwick tree over nonnegative weights with prefix search.
class Fenwick {
 public:
  explicit Fenwick(const std::vector<double>& w) : n_(w.size()), tree_(w.size() + 1, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      tree_[i + 1] += w[i];
      const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
      if (parent <= n_) tree_[parent] += tree_[i + 1];
    }
    top_ = 1;
    while (top_ * 2 <= n_) top_ *= 2;
  }
  void add(std::size_t i, double delta) {
    for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] += delta;
  }
  double total() const {
    double s = 0.0;
    for (std::size_t k = n_; k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }
  // Smallest index whose inclusive prefix sum exceeds r.
  std::size_t find(double r) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step /= 2) {
      if (pos + step <= n_ && tree_[pos + step] <= r) {
        pos += step;
        r -= tree_[pos];
      }
    }
    return std::min(pos, n_ - 1);
  }

 private:
  std::size_t n_;
  std::vector<double> tree_;
  std::size_t top_ = 1;
};

struct Merger {
  ParticleState& st;
  const Params& params;
  SweepStats& stats;
  std::uniform_real_distribution<double> unif{0.0, 1.0};

  // Returns the surviving index, or -1 if both left the system.
  long fire(std::size_t i, std::size_t j) {
    const int d = st.d;
    const int mi = st.m[i];
    const int mj = st.m[j];
    const int total = mi + mj;
    if (total > params.M) {
      st.expelled_mass += total;
      for (int ax = 0; ax < d; ++ax) {
        stats.expelled_momentum[ax] += mi * st.v[i * d + ax] + mj * st.v[j * d + ax];
      }
      st.m[i] = 0;
      st.m[j] = 0;
      ++stats.expulsions;
      return -1;
    }
    const bool keep_i = unif(st.rng) < static_cast<double>(mi) / total;
    const std::size_t survivor = keep_i ? i : j;
    const std::size_t gone = keep_i ? j : i;
    double err = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      const double p = mi * st.v[i * d + ax] + mj * st.v[j * d + ax];
      const double vstar = p / total;
      st.v[survivor * d + ax] = vstar;
      err = std::max(err, std::abs(total * vstar - p));
    }
    st.m[survivor] = total;
    st.m[gone] = 0;
    stats.max_merge_momentum_error = std::max(stats.max_merge_momentum_error, err);
    ++stats.merges;
    return static_cast<long>(survivor);
  }
};

void compact(ParticleState& st) {
  const int d = st.d;
  const bool spatial = !st.x.empty();
  std::size_t w = 0;
  for (std::size_t i = 0; i < st.m.size(); ++i) {
    if (st.m[i] == 0) continue;
    if (w != i) {
      st.m[w] = st.m[i];
      for (int ax = 0; ax < d; ++ax) {
        st.v[w * d + ax] = st.v[i * d + ax];
        if (spatial) st.x[w * d + ax] = st.x[i * d + ax];
      }
    }
    ++w;
  }
  st.m.resize(w);
  st.v.resize(w * d);
  if (spatial) st.x.resize(w * d);
}

// Tau-leap over an explicit candidate pair list processed in shuffled order.
void tau_leap(ParticleState& st, const ParticleConfig& config, const Params& params,
              double dt, std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
              const Mollifier* theta, SweepStats& stats) {
  const double inv_n = 1.0 / static_cast<double>(st.N);
  auto rate = [&](std::size_t i, std::size_t j) {
    double lam = cross_section(st.m[i], st.m[j], params) * velocity_distance(st, i, j) * inv_n;
    if (theta) lam *= (*theta)(torus_distance(&st.x[i * st.d], &st.x[j * st.d], st.d));
    return lam;
  };
  double worst = 0.0;
  for (const auto& [i, j] : pairs) worst = std::max(worst, rate(i, j));
  const double p_max = -std::expm1(-2.0 * worst * dt);
  if (p_max > kMaxPairProbability) {
    std::ostringstream os;
    os << "coagulation_sweep: pair probability " << p_max << " exceeds "
       << kMaxPairProbability << "; reduce particles.dt";
    throw ConfigError(os.str());
  }
  std::shuffle(pairs.begin(), pairs.end(), st.rng);
  std::vector<char> consumed(st.m.size(), 0);
  Merger merger{st, params, stats};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  (void)config;
  for (const auto& [i, j] : pairs) {
    if (consumed[i] || consumed[j]) continue;
    const double p = -std::expm1(-2.0 * rate(i, j) * dt);
    if (p <= 0.0) continue;
    if (unif(st.rng) < p) {
      consumed[i] = consumed[j] = 1;
      merger.fire(i, j);
    }
  }
}

void majorant_sweep(ParticleState& st, const Params& params, double dt, SweepStats& stats) {
  const int d = st.d;
  const std::size_t n0 = st.n_active();
  if (n0 < 2) return;
  std::vector<double> center(d, 0.0);
  for (std::size_t i = 0; i < n0; ++i) {
    for (int ax = 0; ax < d; ++ax) center[ax] += st.v[i * d + ax];
  }
  for (double& c : center) c /= static_cast<double>(n0);
  auto offset = [&](std::size_t i) {
    double s = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      const double dv = st.v[i * d + ax] - center[ax];
      s += dv * dv;
    }
    return std::sqrt(s);
  };
  std::vector<double> u(n0);
  for (std::size_t i = 0; i < n0; ++i) u[i] = offset(i);
  Fenwick tree(u);
  std::vector<std::size_t> slots(n0);
  std::vector<std::size_t> where(n0);
  for (std::size_t i = 0; i < n0; ++i) slots[i] = where[i] = i;
  auto drop = [&](std::size_t i) {
    tree.add(i, -u[i]);
    u[i] = 0.0;
    const std::size_t p = where[i];
    const std::size_t last = slots.back();
    slots[p] = last;
    where[last] = p;
    slots.pop_back();
  };

  const double s_max = max_cross_section(params);
  const double inv_n = 1.0 / static_cast<double>(st.N);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Merger merger{st, params, stats};
  double t = 0.0;
  while (slots.size() >= 2) {
    const double U = tree.total();
    if (!(U > 0.0)) break;
    const double Lambda = 2.0 * s_max * static_cast<double>(slots.size() - 1) * U * inv_n;
    t += std::exponential_distribution<double>(Lambda)(st.rng);
    if (t > dt) break;
    const std::size_t i = tree.find(unif(st.rng) * U);
    if (st.m[i] == 0 || u[i] <= 0.0) continue;
    std::uniform_int_distribution<std::size_t> pick(0, slots.size() - 2);
    std::size_t j = slots[pick(st.rng)];
    if (j == i) j = slots.back();
    const double bound = s_max * (u[i] + u[j]);
    const double actual = cross_section(st.m[i], st.m[j], params) * velocity_distance(st, i, j);
    if (!(unif(st.rng) * bound < actual)) continue;
    const long survivor = merger.fire(i, j);
    if (survivor < 0) {
      drop(i);
      drop(j);
    } else {
      const std::size_t s = static_cast<std::size_t>(survivor);
      drop(s == i ? j : i);
      const double nu = offset(s);
      tree.add(s, nu - u[s]);
      u[s] = nu;
    }
  }
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> near_pairs(const ParticleState& st,
                                                                double eps) {
  const int d = st.d;
  const std::size_t n = st.n_active();
  const int nc = static_cast<int>(std::floor(1.0 / eps));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  if (nc < 3) {
    for (const auto& p : all_pairs(n)) {
      if (torus_distance(&st.x[p.first * d], &st.x[p.second * d], d) < eps) pairs.push_back(p);
    }
    return pairs;
  }
  std::size_t ncells = 1;
  for (int ax = 0; ax < d; ++ax) ncells *= nc;
  std::vector<std::vector<std::uint32_t>> cells(ncells);
  auto cell_of = [&](std::size_t i, std::array<int, 3>& c) {
    std::size_t flat = 0;
    std::size_t mul = 1;
    for (int ax = 0; ax < d; ++ax) {
      c[ax] = std::min(nc - 1, static_cast<int>(st.x[i * d + ax] * nc));
      flat += mul * c[ax];
      mul *= nc;
    }
    return flat;
  };
  std::array<int, 3> c{};
  for (std::size_t i = 0; i < n; ++i) cells[cell_of(i, c)].push_back(static_cast<std::uint32_t>(i));
  int offsets = 1;
  for (int ax = 0; ax < d; ++ax) offsets *= 3;
  for (std::size_t i = 0; i < n; ++i) {
    cell_of(i, c);
    for (int o = 0; o < offsets; ++o) {
      std::size_t flat = 0;
      std::size_t mul = 1;
      int code = o;
      for (int ax = 0; ax < d; ++ax) {
        const int shift = code % 3 - 1;
        code /= 3;
        flat += mul * static_cast<std::size_t>((c[ax] + shift + nc) % nc);
        mul *= nc;
      }
      for (std::uint32_t j : cells[flat]) {
        if (j <= i) continue;
        if (torus_distance(&st.x[i * d], &st.x[j * d], d) < eps) pairs.emplace_back(i, j);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace

void ParticleConfig::validate(const Params& params) const {
  if (N < 2) throw ConfigError("particles.N must be >= 2");
  if (!(dt_p > 0.0)) throw ConfigError("particles.dt must be > 0");
  if (!(mu >= 0.0)) throw ConfigError("model.mu must be >= 0");
  if (mode == ParticleMode::Spatial && !(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("particles.epsilon must lie in (0, 1) in spatial mode");
  }
  if (mode == ParticleMode::MeanField && sweep == SweepKind::CellList) {
    throw ConfigError("particles.sweep=cells requires spatial mode");
  }
  if (mode == ParticleMode::Spatial && sweep == SweepKind::Majorant) {
    throw ConfigError("particles.sweep=majorant requires meanfield mode");
  }
  for (const auto& s : common_noise) {
    if (static_cast<int>(s.size()) != params.d) {
      throw ConfigError("particles.common_noise vectors must have d components");
    }
  }
}

double ParticleState::active_mass() const {
  double s = 0.0;
  for (int mi : m) s += mi;
  return s;
}

std::vector<double> ParticleState::momentum() const {
  std::vector<double> p(d, 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int ax = 0; ax < d; ++ax) p[ax] += m[i] * v[i * d + ax];
  }
  return p;
}

Mollifier::Mollifier(int d, double epsilon) : d_(d), eps_(epsilon) {
  // Radial integral of r^{d-1} r^2 exp(-1/(1-r^2)) on [0,1] by composite Simpson.
  const int n = 20000;
  auto prof = [](double r) { return r < 1.0 ? r * r * std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = static_cast<double>(i) / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += w * std::pow(r, d - 1) * prof(r);
  }
  // The profile peaks at r^2 = (3 - sqrt(5)) / 2.
  const double peak = prof(std::sqrt(0.5 * (3.0 - std::sqrt(5.0))));
  integral /= 3.0 * n;
  const double sphere = d == 1 ? 2.0 : d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  norm_ = 1.0 / (sphere * integral);
  max_ = norm_ * peak / std::pow(eps_, d);
}

double Mollifier::operator()(double r) const {
  const double s = r / eps_;
  if (s >= 1.0) return 0.0;
  return norm_ * s * s * std::exp(-1.0 / (1.0 - s * s)) / std::pow(eps_, d_);
}

ParticleState sample_initial(const InitSpec& init, const Params& params, std::size_t N,
                             std::uint64_t seed, bool spatial) {
  init.validate(params.d, params.M);
  if (N < 1) throw ConfigError("sample_initial: N must be >= 1");
  const int d = params.d;
  ParticleState st;
  st.d = d;
  st.N = N;
  st.rng.seed(splitmix64(seed));
  std::vector<double> r;
  for (const LevelInit& lvl : init.levels) r.push_back(lvl.r);
  std::discrete_distribution<int> level(r.begin(), r.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  st.m.resize(N);
  st.v.resize(N * d);
  if (spatial) st.x.resize(N * d);
  for (std::size_t i = 0; i < N; ++i) {
    const int m = level(st.rng) + 1;
    st.m[i] = m;
    const auto& comps = init.levels[m - 1].components;
    std::size_t c = 0;
    if (comps.size() > 1) {
      std::vector<double> w;
      for (const auto& comp : comps) w.push_back(comp.weight);
      c = std::discrete_distribution<std::size_t>(w.begin(), w.end())(st.rng);
    }
    for (int ax = 0; ax < d; ++ax) {
      st.v[i * d + ax] = comps[c].mean[ax] + std::sqrt(comps[c].var[ax]) * normal(st.rng);
    }
    if (spatial) {
      for (int ax = 0; ax < d; ++ax) st.x[i * d + ax] = unif(st.rng);
    }
  }
  st.initial_mass = st.active_mass();
  return st;
}

void em_step(ParticleState& state, const ParticleConfig& config, const Params& params) {
  const double dt = config.dt_p;
  const double c_max = max_stokes_coefficient(params);
  if (dt * c_max > 0.1 + 1e-12) {
    throw ConfigError("em_step: particles.dt * max c(m) must be <= 0.1");
  }
  const int d = state.d;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> common(d, 0.0);
  for (const auto& sigma : config.common_noise) {
    const double dW = std::sqrt(dt) * normal(state.rng);
    for (int ax = 0; ax < d; ++ax) common[ax] += sigma[ax] * dW;
  }
  std::vector<double> c(params.M + 1, 0.0);
  for (int m = 1; m <= params.M; ++m) c[m] = stokes_coefficient(m, params);
  const double amp = std::sqrt(2.0 * config.mu * dt);
  const bool spatial = !state.x.empty();
  const std::size_t n = state.n_active();
  const std::uint64_t step_key = splitmix64(state.rng() ^ splitmix64(state.steps));
  for (std::size_t begin = 0; begin < n; begin += kNoiseChunk) {
    const std::size_t end = std::min(n, begin + kNoiseChunk);
    std::mt19937_64 gen(splitmix64(step_key + begin / kNoiseChunk));
    std::normal_distribution<double> xi(0.0, 1.0);
    for (std::size_t i = begin; i < end; ++i) {
      const double ci = c[state.m[i]];
      for (int ax = 0; ax < d; ++ax) {
        double& v = state.v[i * d + ax];
        const double v_old = v;
        v += ci * (-v_old * dt + amp * xi(gen) + common[ax]);
        if (spatial) {
          double& x = state.x[i * d + ax];
          x += v_old * dt;
          x -= std::floor(x);
          if (x >= 1.0) x = 0.0;
        }
      }
    }
  }
  ++state.steps;
}

SweepStats coagulation_sweep(ParticleState& state, const ParticleConfig& config,
                             const Params& params, double dt_p) {
  SweepStats stats;
  stats.momentum_before = state.momentum();
  stats.expelled_momentum.assign(state.d, 0.0);
  const bool spatial = config.mode == ParticleMode::Spatial;
  if (spatial && state.x.empty()) throw ConfigError("spatial sweep needs positions");
  std::optional<Mollifier> theta;
  if (spatial) theta.emplace(state.d, config.epsilon);

  switch (config.sweep) {
    case SweepKind::Pairwise: {
      auto pairs = all_pairs(state.n_active());
      tau_leap(state, config, params, dt_p, pairs, theta ? &*theta : nullptr, stats);
      break;
    }
    case SweepKind::CellList: {
      auto pairs = near_pairs(state, config.epsilon);
      tau_leap(state, config, params, dt_p, pairs, &*theta, stats);
      break;
    }
    case SweepKind::Majorant:
      if (spatial) throw ConfigError("majorant sweep is mean-field only");
      majorant_sweep(state, params, dt_p, stats);
      break;
  }
  compact(state);
  stats.momentum_after = state.momentum();
  return stats;
}

EmpiricalDensity empirical_density(const ParticleState& state, const VelocityGrid& grid,
                                   int M) {
  if (grid.dim() != state.d) throw std::invalid_argument("empirical_density: dimension mismatch");
  EmpiricalDensity out{DensitySet(grid, M), std::vector<double>(M, 0.0)};
  const int d = state.d;
  const int G = grid.cells_per_axis();
  const double h = grid.spacing();
  const double unit = 1.0 / static_cast<double>(state.N);
  const double value = unit / grid.cell_volume();
  for (std::size_t i = 0; i < state.n_active(); ++i) {
    const int m = state.m[i];
    if (m < 1 || m > M) throw std::invalid_argument("empirical_density: mass level out of range");
    std::array<long, 3> lo{};
    std::array<double, 3> w_hi{};
    for (int ax = 0; ax < d; ++ax) {
      const double pos = state.v[i * d + ax] / h + 0.5 * (G - 1);
      const double fl = std::floor(pos);
      lo[ax] = static_cast<long>(fl);
      w_hi[ax] = pos - fl;
    }
    auto level = out.f.level(m);
    for (int corner = 0; corner < (1 << d); ++corner) {
      double w = 1.0;
      std::size_t cell = 0;
      bool inside = true;
      for (int ax = 0; ax < d; ++ax) {
        const bool hi = (corner >> ax) & 1;
        const long j = lo[ax] + (hi ? 1 : 0);
        w *= hi ? w_hi[ax] : 1.0 - w_hi[ax];
        if (j < 0 || j >= G) inside = false;
        else cell += grid.stride(ax) * static_cast<std::size_t>(j);
      }
      if (w == 0.0) continue;
      if (inside) level[cell] += w * value;
      else out.out_of_box[m - 1] += w * unit;
    }
  }
  return out;
}

ParticleRunOutput run_particles(const Params& params, const ParticleConfig& config,
                                const InitSpec& init, const RunControl& control) {
  params.validate();
  config.validate(params);
  if (!(control.output_every > 0.0)) throw ConfigError("output.every must be > 0");
  const VelocityGrid grid = build_grid(params);
  const bool spatial = config.mode == ParticleMode::Spatial;

  ParticleRunOutput out{{}, {}, sample_initial(init, params, config.N, params.seed, spatial)};
  ParticleState& st = out.final_state;

  const double t_end = params.t_end;
  const long K = t_end > 0.0 ? static_cast<long>(std::ceil(t_end / config.dt_p - 1e-9)) : 0;
  const double dt = K > 0 ? t_end / K : config.dt_p;
  auto step_of = [&](double t) { return K > 0 ? std::lround(t / dt) : 0L; };

  std::vector<long> row_steps;
  std::vector<double> row_times;
  for (long k = 0;; ++k) {
    const double t = k * control.output_every;
    if (t > t_end * (1.0 + 1e-12)) break;
    row_times.push_back(std::min(t, t_end));
  }
  if (row_times.back() < t_end) row_times.push_back(t_end);
  for (double t : row_times) row_steps.push_back(step_of(t));
  std::vector<long> snap_steps;
  for (double t : control.snapshot_times) {
    if (t < 0.0 || t > t_end * (1.0 + 1e-12)) throw ConfigError("snapshot time outside [0, t_end]");
    snap_steps.push_back(step_of(std::min(t, t_end)));
  }

  ParticleConfig step_config = config;
  step_config.dt_p = dt;
  std::optional<DensitySet> reference;

  auto emit = [&](long k) {
    const double t = k == K ? t_end : k * dt;
    const bool row = std::find(row_steps.begin(), row_steps.end(), k) != row_steps.end();
    const bool snap = std::find(snap_steps.begin(), snap_steps.end(), k) != snap_steps.end();
    if (!row && !snap && reference) return;
    EmpiricalDensity emp = empirical_density(st, grid, params.M);
    double leak = 0.0;
    for (int m = 1; m <= params.M; ++m) leak += m * emp.out_of_box[m - 1];
    if (!reference) reference = emp.f;
    const SolverState view{t, emp.f, st.expelled_mass / static_cast<double>(st.N), leak};
    if (row) out.rows.push_back(compute_row(view, &*reference, control.diagnostics));
    if (snap) out.snapshots.push_back({t, std::move(emp.f)});
  };

  emit(0);
  for (long k = 1; k <= K; ++k) {
    em_step(st, step_config, params);
    const SweepStats s = coagulation_sweep(st, step_config, params, dt);
    out.merges += s.merges;
    out.expulsions += s.expulsions;
    out.max_merge_momentum_error = std::max(out.max_merge_momentum_error, s.max_merge_momentum_error);
    out.max_mass_ledger_error =
        std::max(out.max_mass_ledger_error, std::abs(st.active_mass() + st.expelled_mass - st.initial_mass));
    emit(k);
  }
  return out;
}

}  // namespace smolv
