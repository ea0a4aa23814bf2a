#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "smolv/collision.hpp"
#include "smolv/integrator.hpp"
#include "support.hpp"

using namespace smolv;

namespace {

double scale_of(const DensitySet& f) {
  double s = 1.0;
  for (double x : f.data()) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

TEST_CASE("deposition matches the gather reference, d=1") {
  const Params p = testing::desk_params(1, 3, 16, 4.0);
  const VelocityGrid g = build_grid(p);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DensitySet f = testing::random_density(g, 3, seed);
    const DensitySet ref = oracle::collision_gather(f, p);
    const CollisionOutput out = collision_operator(f, p);
    CHECK(testing::max_abs_diff(out.Q, ref) <= 1e-12 * scale_of(ref));
    CHECK(out.expelled_mass_rate ==
          doctest::Approx(oracle::expelled_rate_direct(f, p)).epsilon(1e-12));
  }
}

TEST_CASE("deposition matches the gather reference, d=2 and d=3") {
  for (int d : {2, 3}) {
    const Params p = testing::desk_params(d, 3, d == 2 ? 6 : 4, 2.0);
    const VelocityGrid g = build_grid(p);
    const DensitySet f = testing::random_density(g, 3, 11 + d);
    const DensitySet ref = oracle::collision_gather(f, p);
    const CollisionOutput out = collision_operator(f, p);
    CHECK(testing::max_abs_diff(out.Q, ref) <= 1e-12 * scale_of(ref));
  }
}

TEST_CASE("truncated operator matches the truncated gather reference") {
  Params p = testing::desk_params(2, 2, 8, 3.0);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = testing::random_density(g, 2, 3);
  const Truncation R = 1.7;
  const DensitySet ref = oracle::collision_gather(f, p, R);
  CHECK(testing::max_abs_diff(collision_operator(f, p, R).Q, ref) <= 1e-12 * scale_of(ref));
}

TEST_CASE("two-bump example: gain 1 into m=2 at v*=0, loss 2 from m=1") {
  const Params p = testing::desk_params(1, 2, 5, 2.5);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = oracle::two_bump(g, 2);
  const CollisionOutput out = collision_operator(f, p);
  const double h = g.spacing();
  // Level 2 gains only at the center cell v=0.
  CHECK(out.Q.level(2)[2] * h == doctest::Approx(1.0).epsilon(1e-12));
  double other = 0.0;
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (a != 2) other += std::abs(out.Q.level(2)[a]);
  }
  CHECK(other == 0.0);
  CHECK(-out.Q.mass(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out.expelled_mass_rate == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("two-bump example with M=1: everything colliding is expelled") {
  const Params p = testing::desk_params(1, 1, 5, 2.5);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = oracle::two_bump(g, 1);
  const CollisionOutput out = collision_operator(f, p);
  CHECK(out.expelled_mass_rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(-out.Q.mass(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stability_dt(f, p, 10.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("even grid splits the merge velocity between the two central cells") {
  const Params p = testing::desk_params(1, 2, 4, 2.0);
  const VelocityGrid g = build_grid(p);
  // Centers are -1.5, -0.5, 0.5, 1.5: bumps at -0.5 and 1.5 merge at 0.5.
  DensitySet f(g, 2);
  f.level(1)[1] = 1.0;
  f.level(1)[3] = 1.0;
  const CollisionOutput out = collision_operator(f, p);
  CHECK(out.Q.level(2)[2] > 0.0);
  CHECK(out.Q.level(2)[1] == 0.0);
  // Bumps at -1.5 and 1.5 merge at 0, half way between cells 1 and 2.
  DensitySet e(g, 2);
  e.level(1)[0] = 1.0;
  e.level(1)[3] = 1.0;
  const CollisionOutput o2 = collision_operator(e, p);
  CHECK(o2.Q.level(2)[1] == o2.Q.level(2)[2]);
  CHECK(o2.Q.level(2)[1] > 0.0);
}

TEST_CASE("weighted mass and momentum ledgers close exactly") {
  for (int d : {1, 2}) {
    const Params p = testing::desk_params(d, 3, d == 1 ? 32 : 10, 3.0);
    const VelocityGrid g = build_grid(p);
    for (std::uint64_t seed = 20; seed < 23; ++seed) {
      const DensitySet f = testing::random_density(g, 3, seed);
      const CollisionOutput out = collision_operator(f, p);
      double weighted = 0.0;
      for (int m = 1; m <= 3; ++m) weighted += m * out.Q.mass(m);
      CHECK(std::abs(weighted + out.expelled_mass_rate) <= 1e-12 * out.expelled_mass_rate + 1e-12);
      for (int ax = 0; ax < d; ++ax) {
        double mom = 0.0;
        for (int m = 1; m <= 3; ++m) {
          for (std::size_t a = 0; a < g.size(); ++a) {
            mom += m * g.center(a, ax) * out.Q.level(m)[a] * g.cell_volume();
          }
        }
        CHECK(std::abs(mom + out.expelled_momentum_rate[ax]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("Q is a symmetric bilinear form: Q(f+g) = Q(f,f) + Q(f,g) + Q(g,f) + Q(g,g)") {
  const Params p = testing::desk_params(1, 3, 24, 3.0);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = testing::random_density(g, 3, 41);
  const DensitySet e = testing::random_density(g, 3, 42);
  const DensitySet sum = f + e;
  DensitySet rhs = collision_fields(f, f, p) + collision_fields(f, e, p);
  rhs += collision_fields(e, f, p);
  rhs += collision_fields(e, e, p);
  CHECK(testing::max_abs_diff(collision_operator(sum, p).Q, rhs) <= 1e-11 * scale_of(rhs));
  CHECK(testing::max_abs_diff(collision_fields(f, f, p), collision_operator(f, p).Q) == 0.0);
}

TEST_CASE("Q is homogeneous of degree two") {
  const Params p = testing::desk_params(2, 2, 8, 2.0);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = testing::random_density(g, 2, 5);
  const DensitySet q = collision_operator(f, p).Q;
  const DensitySet q3 = collision_operator(3.0 * f, p).Q;
  CHECK(testing::max_abs_diff(q3, 9.0 * q) <= 1e-12 * scale_of(q3));
}

TEST_CASE("reflection symmetry is preserved") {
  const Params p = testing::desk_params(1, 3, 32, 4.0);
  const VelocityGrid g = build_grid(p);
  DensitySet f = testing::random_density(g, 3, 9);
  for (int m = 1; m <= 3; ++m) {
    auto fm = f.level(m);
    for (int i = 0; i < 16; ++i) fm[31 - i] = fm[i];
  }
  const DensitySet q = collision_operator(f, p).Q;
  for (int m = 1; m <= 3; ++m) {
    for (int i = 0; i < 16; ++i) {
      CHECK(q.level(m)[i] == doctest::Approx(q.level(m)[31 - i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("truncation at the box corner radius is bit-identical to no truncation") {
  for (int d : {1, 2}) {
    const Params p = testing::desk_params(d, 3, d == 1 ? 40 : 10, 3.0);
    const VelocityGrid g = build_grid(p);
    const DensitySet f = testing::random_density(g, 3, 77);
    const CollisionOutput full = collision_operator(f, p);
    const CollisionOutput trunc = collision_operator(f, p, 3.0 * std::sqrt(double(d)));
    CHECK(testing::max_abs_diff(full.Q, trunc.Q) == 0.0);
    CHECK(full.expelled_mass_rate == trunc.expelled_mass_rate);
  }
}

TEST_CASE("truncation removes interactions outside the ball") {
  const Params p = testing::desk_params(1, 2, 16, 4.0);
  const VelocityGrid g = build_grid(p);
  DensitySet f(g, 2);
  f.level(1)[0] = 1.0;   // v = -3.75
  f.level(1)[15] = 1.0;  // v = +3.75
  const CollisionOutput out = collision_operator(f, p, 2.0);
  CHECK(out.Q.data().size() == g.size() * 2);
  for (double x : out.Q.data()) CHECK(x == 0.0);
}

TEST_CASE("loss is the density times the loss rate, and gain conserves number") {
  const Params p = testing::desk_params(1, 4, 20, 3.0);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = testing::random_density(g, 4, 13);
  const DensitySet loss = loss_field(f, p);
  const DensitySet rate = loss_rate_coefficients(f, p);
  for (std::size_t i = 0; i < f.data().size(); ++i) {
    CHECK(loss.data()[i] == doctest::Approx(f.data()[i] * rate.data()[i]).epsilon(1e-14));
  }
  const GainResult gain = gain_deposit(f, p);
  for (int m = 1; m <= 4; ++m) {
    CHECK(gain.gain.mass(m) == doctest::Approx(gain.deposited_number_rate[m - 1]).epsilon(1e-12));
  }
  CHECK(gain.gain.mass(1) == 0.0);
}

TEST_CASE("gain is nonnegative and loss only touches occupied cells") {
  const Params p = testing::desk_params(1, 3, 24, 3.0);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = testing::random_density(g, 3, 31);
  const GainResult gain = gain_deposit(f, p);
  const DensitySet loss = loss_field(f, p);
  for (double x : gain.gain.data()) CHECK(x >= 0.0);
  for (std::size_t i = 0; i < f.data().size(); ++i) {
    if (f.data()[i] == 0.0) CHECK(loss.data()[i] == 0.0);
  }
}

TEST_CASE("nonlinearity bound ratio is finite and the zero state is rejected") {
  const Params p = testing::desk_params(1, 3, 32, 4.0);
  const VelocityGrid g = build_grid(p);
  const DensitySet f = testing::random_density(g, 3, 2);
  for (Lebesgue lp : {Lebesgue::L1, Lebesgue::L2, Lebesgue::Linf}) {
    const double r = nonlinearity_bound_ratio(f, p, {lp, 0});
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
  }
  CHECK_THROWS_AS(nonlinearity_bound_ratio(DensitySet(g, 3), p, {Lebesgue::L1, 0}),
                  std::domain_error);
}

TEST_CASE("shape mismatches are rejected") {
  const Params p = testing::desk_params(1, 2, 8, 2.0);
  const VelocityGrid g = build_grid(p);
  const DensitySet f(g, 2);
  const DensitySet wrong(VelocityGrid(1, 10, 2.0), 2);
  CHECK_THROWS_AS(collision_fields(f, wrong, p), std::invalid_argument);
  CHECK_THROWS_AS(collision_operator(DensitySet(g, 3), p), std::invalid_argument);
}
