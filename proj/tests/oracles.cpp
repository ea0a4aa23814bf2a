#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "smolv/particles.hpp"

namespace smolv::oracle {

namespace {

bool in_ball(const VelocityGrid& grid, std::size_t a, Truncation R) {
  if (!R) return true;
  double s = 0.0;
  for (int ax = 0; ax < grid.dim(); ++ax) s += grid.center(a, ax) * grid.center(a, ax);
  return s <= (*R) * (*R);
}

double dist(const VelocityGrid& grid, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (int ax = 0; ax < grid.dim(); ++ax) {
    const double dv = grid.center(a, ax) - grid.center(b, ax);
    s += dv * dv;
  }
  return std::sqrt(s);
}

// Floating-point CIC weight of point v on cell c.
double cic_weight(const VelocityGrid& grid, const std::vector<double>& v, std::size_t c) {
  const double h = grid.spacing();
  double w = 1.0;
  for (int ax = 0; ax < grid.dim(); ++ax) {
    const double r = std::abs(v[ax] - grid.center(c, ax)) / h;
    if (r >= 1.0 - 1e-12) return 0.0;
    w *= 1.0 - r;
  }
  return w;
}

}  // namespace

DensitySet collision_gather(const DensitySet& f, const Params& params, Truncation R) {
  const VelocityGrid& grid = f.grid();
  const int M = f.levels();
  const int d = grid.dim();
  const double hd = grid.cell_volume();
  const std::size_t n = grid.size();
  DensitySet q(grid, M);
  std::vector<double> vstar(d);
  for (int m = 1; m <= M; ++m) {
    auto qm = q.level(m);
    for (std::size_t c = 0; c < n; ++c) {
      double gain = 0.0;
      for (int a_lvl = 1; a_lvl < m; ++a_lvl) {
        const int b_lvl = m - a_lvl;
        const double s = cross_section(a_lvl, b_lvl, params);
        for (std::size_t a = 0; a < n; ++a) {
          if (!in_ball(grid, a, R)) continue;
          for (std::size_t b = 0; b < n; ++b) {
            if (!in_ball(grid, b, R)) continue;
            for (int ax = 0; ax < d; ++ax) {
              vstar[ax] = (a_lvl * grid.center(a, ax) + b_lvl * grid.center(b, ax)) / m;
            }
            const double w = cic_weight(grid, vstar, c);
            if (w == 0.0) continue;
            gain += s * f.level(a_lvl)[a] * f.level(b_lvl)[b] * dist(grid, a, b) * hd * w;
          }
        }
      }
      double loss = 0.0;
      if (in_ball(grid, c, R)) {
        for (int k = 1; k <= M; ++k) {
          const double s = cross_section(m, k, params);
          for (std::size_t b = 0; b < n; ++b) {
            if (!in_ball(grid, b, R)) continue;
            loss += 2.0 * s * f.level(m)[c] * f.level(k)[b] * dist(grid, c, b) * hd;
          }
        }
      }
      qm[c] = gain - loss;
    }
  }
  return q;
}

double expelled_rate_direct(const DensitySet& f, const Params& params, Truncation R) {
  const VelocityGrid& grid = f.grid();
  const int M = f.levels();
  const double hd = grid.cell_volume();
  double total = 0.0;
  for (int n = 1; n <= M; ++n) {
    for (int k = 1; k <= M; ++k) {
      if (n + k <= M) continue;
      const double s = cross_section(n, k, params);
      for (std::size_t a = 0; a < grid.size(); ++a) {
        if (!in_ball(grid, a, R)) continue;
        for (std::size_t b = 0; b < grid.size(); ++b) {
          if (!in_ball(grid, b, R)) continue;
          total += (n + k) * s * f.level(n)[a] * f.level(k)[b] * dist(grid, a, b) * hd * hd;
        }
      }
    }
  }
  return total;
}

OUMoments ou_moments(double mean0, double var0, double c, double kappa, double tau) {
  const double e1 = std::exp(-c * tau);
  const double e2 = std::exp(-2.0 * c * tau);
  return {e1 * mean0, var0 * e2 + kappa * c * (1.0 - e2)};
}

OUMoments field_moments(const DensitySet& f, int m, int axis) {
  const VelocityGrid& grid = f.grid();
  const auto fm = f.level(m);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    m0 += fm[a];
    m1 += fm[a] * grid.center(a, axis);
  }
  const double mean = m1 / m0;
  double m2 = 0.0;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double z = grid.center(a, axis) - mean;
    m2 += fm[a] * z * z;
  }
  return {mean, m2 / m0};
}

DensitySet two_bump(const VelocityGrid& grid, int M) {
  if (grid.dim() != 1) throw std::invalid_argument("two_bump: d must be 1");
  DensitySet f(grid, M);
  const double h = grid.spacing();
  int found = 0;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double v = grid.center(a, 0);
    if (std::abs(std::abs(v) - 1.0) < 1e-12) {
      f.level(1)[a] = 0.5 / h;
      ++found;
    }
  }
  if (found != 2) throw std::invalid_argument("two_bump: grid has no centers at +-1");
  return f;
}

std::vector<double> sampling_noise_l1(const DensitySet& f, std::size_t N,
                                      const std::vector<std::uint64_t>& seeds) {
  const VelocityGrid& grid = f.grid();
  const int M = f.levels();
  const int d = grid.dim();
  const double h = grid.spacing();
  std::vector<double> weights;
  std::vector<std::pair<int, std::size_t>> where;
  for (int m = 1; m <= M; ++m) {
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const double w = f.level(m)[a];
      if (w > 0.0) {
        weights.push_back(w);
        where.emplace_back(m, a);
      }
    }
  }
  double total = 0.0;
  for (double w : weights) total += w * grid.cell_volume();
  // The particle count tracks the number density, which is below 1 once
  // coagulation has merged particles.
  const std::size_t n = static_cast<std::size_t>(std::llround(total * static_cast<double>(N)));
  std::vector<double> out;
  for (std::uint64_t seed : seeds) {
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    ParticleState st;
    st.d = d;
    st.N = N;
    st.m.resize(n);
    st.v.resize(n * d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [m, a] = where[pick(rng)];
      st.m[i] = m;
      for (int ax = 0; ax < d; ++ax) st.v[i * d + ax] = grid.center(a, ax) + h * u(rng);
    }
    const EmpiricalDensity emp = empirical_density(st, grid, M);
    double s = 0.0;
    auto x = emp.f.data();
    auto y = f.data();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    out.push_back(s * grid.cell_volume());
  }
  return out;
}

}  // namespace smolv::oracle
