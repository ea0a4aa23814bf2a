#include "smolv/collision.hpp"

#include <cmath>
#include <stdexcept>

#include "smolv/parallel.hpp"

namespace smolv {

namespace {

// Cells inside the truncation ball and the lattice distance table. With no
// truncation every cell is in the ball, and the arithmetic below is the same
// for both cases, which is what makes R >= V*sqrt(d) bit-identical to R = inf.
struct PairGeometry {
  PairGeometry(const VelocityGrid& grid, Truncation R) : grid(grid) {
    const std::size_t n = grid.size();
    ball.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (!R || grid.speed_sq(a) <= (*R) * (*R)) ball.push_back(a);
    }
    idx.resize(ball.size());
    for (std::size_t p = 0; p < ball.size(); ++p) idx[p] = grid.multi_index(ball[p]);
    const int G = grid.cells_per_axis();
    const std::size_t max_sq = static_cast<std::size_t>(grid.dim()) * (G - 1) * (G - 1);
    root.resize(max_sq + 1);
    for (std::size_t k = 0; k <= max_sq; ++k) {
      root[k] = grid.spacing() * std::sqrt(static_cast<double>(k));
    }
  }

  double distance(std::size_t p, std::size_t q) const {
    std::size_t s = 0;
    for (int k = 0; k < grid.dim(); ++k) {
      const long delta = idx[p][k] - idx[q][k];
      s += static_cast<std::size_t>(delta * delta);
    }
    return root[s];
  }

  const VelocityGrid& grid;
  std::vector<std::size_t> ball;
  std::vector<std::array<int, 3>> idx;
  std::vector<double> root;
};

struct Evaluation {
  Evaluation(const DensitySet& shape)
      : loss(shape.grid(), shape.levels()),
        rate(shape.grid(), shape.levels()),
        gain(shape.grid(), shape.levels()) {}

  DensitySet loss;
  DensitySet rate;  // lambda_m(v_a)
  DensitySet gain;
  std::vector<double> deposited;
  double expelled_mass = 0.0;
  std::vector<double> expelled_momentum;
  double pair_flux = 0.0;
};

struct ChunkTally {
  std::vector<double> gain;  // levels 2..M, level-major, full grid
  std::vector<double> deposited;
  double expelled_mass = 0.0;
  std::vector<double> expelled_momentum;
  double pair_flux = 0.0;
};

void check_shapes(const DensitySet& f, const DensitySet& g, const Params& params) {
  if (!f.grid().same_as(g.grid()) || f.levels() != g.levels()) {
    throw std::invalid_argument("collision: density sets differ in grid or levels");
  }
  if (f.levels() != params.M || f.grid().dim() != params.d) {
    throw std::invalid_argument("collision: density set does not match params (d, M)");
  }
}

// Spread `value` (a density rate) over the cloud-in-cell stencil of the merge
// point (n*ia + k*ib)/(n+k), computed in exact integer arithmetic per axis.
inline void deposit(double* out, const VelocityGrid& grid, const std::array<int, 3>& ia,
                    const std::array<int, 3>& ib, int n, int k, double value) {
  const int t = n + k;
  const int d = grid.dim();
  std::array<std::size_t, 3> lo{};
  std::array<double, 3> w_hi{};
  std::array<bool, 3> split{};
  for (int ax = 0; ax < d; ++ax) {
    const int num = n * ia[ax] + k * ib[ax];
    lo[ax] = static_cast<std::size_t>(num / t);
    const int rem = num % t;
    split[ax] = rem != 0;
    w_hi[ax] = static_cast<double>(rem) / t;
  }
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double w = value;
    std::size_t cell = 0;
    bool skip = false;
    for (int ax = 0; ax < d; ++ax) {
      const bool hi = (c >> ax) & 1;
      if (hi && !split[ax]) {
        skip = true;
        break;
      }
      w *= hi ? w_hi[ax] : 1.0 - w_hi[ax];
      cell += grid.stride(ax) * (lo[ax] + (hi ? 1 : 0));
    }
    if (!skip) out[cell] += w;
  }
}

Evaluation evaluate(const DensitySet& f, const DensitySet& g, const Params& params,
                    Truncation R, bool want_gain) {
  check_shapes(f, g, params);
  const VelocityGrid& grid = f.grid();
  const int M = params.M;
  const int d = grid.dim();
  const double hd = grid.cell_volume();
  const std::size_t ncell = grid.size();
  const PairGeometry geom(grid, R);
  const std::size_t nb = geom.ball.size();

  std::vector<double> s(static_cast<std::size_t>(M + 1) * (M + 1), 0.0);
  for (int n = 1; n <= M; ++n) {
    for (int k = 1; k <= M; ++k) s[n * (M + 1) + k] = cross_section(n, k, params);
  }

  Evaluation out(f);
  out.deposited.assign(M, 0.0);
  out.expelled_momentum.assign(d, 0.0);

  const std::size_t chunks = reduction_chunks(nb);
  std::vector<ChunkTally> tallies(chunks);

  parallel_chunks(nb, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    ChunkTally& tally = tallies[chunk];
    if (want_gain && M > 1) tally.gain.assign(static_cast<std::size_t>(M - 1) * ncell, 0.0);
    tally.deposited.assign(M, 0.0);
    tally.expelled_momentum.assign(d, 0.0);
    std::vector<double> row(nb);
    std::vector<double> A(M + 1);               // sum_b g_n(b)|v_a - v_b| h^d
    std::vector<double> B((M + 1) * d);         // same with v_b
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t a = geom.ball[p];
      for (std::size_t q = 0; q < nb; ++q) row[q] = geom.distance(p, q) * hd;

      for (int n = 1; n <= M; ++n) {
        auto gn = g.level(n);
        double acc = 0.0;
        for (std::size_t q = 0; q < nb; ++q) acc += gn[geom.ball[q]] * row[q];
        A[n] = acc;
      }
      for (int m = 1; m <= M; ++m) {
        double lam = 0.0;
        for (int n = 1; n <= M; ++n) lam += s[n * (M + 1) + m] * A[n];
        // Factor 2 of the loss term: each ordered pair removes its first
        // reactant, and each unordered pair appears twice.
        lam *= 2.0;
        out.rate.level(m)[a] = lam;
        out.loss.level(m)[a] = f.level(m)[a] * lam;
      }
      if (!want_gain) continue;

      bool need_moment = false;
      for (int n = 1; n <= M && !need_moment; ++n) {
        need_moment = f.level(n)[a] != 0.0;
      }
      if (need_moment) {
        for (int k = 1; k <= M; ++k) {
          auto gk = g.level(k);
          for (int ax = 0; ax < d; ++ax) {
            double acc = 0.0;
            for (std::size_t q = 0; q < nb; ++q) {
              acc += gk[geom.ball[q]] * row[q] * grid.center(geom.ball[q], ax);
            }
            B[k * d + ax] = acc;
          }
        }
      }

      for (int n = 1; n <= M; ++n) {
        const double fa = f.level(n)[a];
        if (fa == 0.0) continue;
        for (int k = 1; k <= M; ++k) {
          const double snk = s[n * (M + 1) + k];
          // Number rate leaving this (a, n) with partners of level k, summed over b.
          const double F = snk * fa * A[k] * hd;
          tally.pair_flux += F;
          if (n + k > M) {
            tally.expelled_mass += (n + k) * F;
            for (int ax = 0; ax < d; ++ax) {
              tally.expelled_momentum[ax] +=
                  snk * fa * hd * (n * grid.center(a, ax) * A[k] + k * B[k * d + ax]);
            }
            continue;
          }
          tally.deposited[n + k - 1] += F;
          // Deposit density rate F_ab / h^d = s f_n(a) g_k(b) |v_a - v_b| h^d.
          double* dst = tally.gain.data() + static_cast<std::size_t>(n + k - 2) * ncell;
          const double coef = snk * fa;
          auto gk = g.level(k);
          for (std::size_t q = 0; q < nb; ++q) {
            const double gb = gk[geom.ball[q]];
            if (gb == 0.0 || q == p) continue;
            deposit(dst, grid, geom.idx[p], geom.idx[q], n, k, coef * gb * row[q]);
          }
        }
      }
    }
  });

  for (const ChunkTally& tally : tallies) {
    if (!tally.gain.empty()) {
      for (int t = 2; t <= M; ++t) {
        auto dst = out.gain.level(t);
        const double* src = tally.gain.data() + static_cast<std::size_t>(t - 2) * ncell;
        for (std::size_t a = 0; a < ncell; ++a) dst[a] += src[a];
      }
    }
    for (int m = 0; m < M; ++m) out.deposited[m] += tally.deposited[m];
    out.expelled_mass += tally.expelled_mass;
    for (int ax = 0; ax < d; ++ax) out.expelled_momentum[ax] += tally.expelled_momentum[ax];
    out.pair_flux += tally.pair_flux;
  }
  return out;
}

}  // namespace

DensitySet loss_field(const DensitySet& f, const Params& params, Truncation R) {
  return loss_field(f, f, params, R);
}

DensitySet loss_field(const DensitySet& f, const DensitySet& g, const Params& params,
                      Truncation R) {
  return evaluate(f, g, params, R, false).loss;
}

GainResult gain_deposit(const DensitySet& f, const Params& params, Truncation R) {
  return gain_deposit(f, f, params, R);
}

GainResult gain_deposit(const DensitySet& f, const DensitySet& g, const Params& params,
                        Truncation R) {
  Evaluation e = evaluate(f, g, params, R, true);
  GainResult out(f);
  out.gain = std::move(e.gain);
  out.deposited_number_rate = std::move(e.deposited);
  return out;
}

CollisionOutput collision_operator(const DensitySet& f, const Params& params, Truncation R) {
  Evaluation e = evaluate(f, f, params, R, true);
  CollisionOutput out(f);
  auto q = out.Q.data();
  auto gain = e.gain.data();
  auto loss = e.loss.data();
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = gain[i] - loss[i];
  out.expelled_mass_rate = e.expelled_mass;
  out.expelled_momentum_rate = std::move(e.expelled_momentum);
  out.pair_flux_total = e.pair_flux;
  return out;
}

DensitySet collision_fields(const DensitySet& f, const DensitySet& g, const Params& params,
                            Truncation R) {
  Evaluation e = evaluate(f, g, params, R, true);
  DensitySet q = std::move(e.gain);
  auto qd = q.data();
  auto loss = e.loss.data();
  for (std::size_t i = 0; i < qd.size(); ++i) qd[i] -= loss[i];
  return q;
}

DensitySet loss_rate_coefficients(const DensitySet& f, const Params& params, Truncation R) {
  return evaluate(f, f, params, R, false).rate;
}

double nonlinearity_bound_ratio(const DensitySet& f, const Params& params,
                                WeightedNormSpec spec, Truncation R) {
  const CollisionOutput out = collision_operator(f, params, R);
  const WeightedNormSpec lifted{spec.p, spec.k + 1};
  const WeightedNormSpec l1_lifted{Lebesgue::L1, spec.k + 1};
  double num = 0.0;
  double den_p = 0.0;
  double den_1 = 0.0;
  for (int m = 1; m <= f.levels(); ++m) {
    num += weighted_norm(out.Q.level(m), spec, f.grid());
    den_p += weighted_norm(f.level(m), lifted, f.grid());
    den_1 += weighted_norm(f.level(m), l1_lifted, f.grid());
  }
  const double den = den_p * den_1;
  if (!(den > 0.0)) {
    throw std::domain_error("nonlinearity_bound_ratio: zero denominator (f is zero)");
  }
  return num / den;
}

}  // namespace smolv
