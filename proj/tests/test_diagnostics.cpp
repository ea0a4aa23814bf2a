#include <cmath>
#include <numbers>

#include "doctest.h"
#include "smolv/diagnostics.hpp"
#include "support.hpp"

using namespace smolv;

TEST_CASE("moments of a centered Gaussian") {
  const VelocityGrid g(1, 256, 8.0);
  const DensitySet f = testing::gaussian_density(g, 2, 2, 0.0, 1.0, 0.5);
  const SolverState st{0.0, f, 0.25, 0.125};
  const DiagnosticsRow r = compute_row(st);
  CHECK(r.mass[0] == 0.0);
  CHECK(r.mass[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.T == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.expelled == 0.25);
  CHECK(r.leakage == 0.125);
  CHECK(std::abs(r.momentum[0]) < 1e-14);
  CHECK(r.moment2 == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.moment_k[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.moment_k[2] == doctest::Approx(r.moment2).epsilon(1e-13));
  // E|X| = sqrt(2/pi), E X^4 = 3
  CHECK(r.moment_k[1] == doctest::Approx(0.5 * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-3));
  CHECK(r.moment_k[4] == doctest::Approx(1.5).epsilon(1e-6));
  // int f^2 = mass^2 / (2 sqrt(pi))
  CHECK(r.l2_energy == doctest::Approx(0.25 / (2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-6));
  // int |f'|^2 = mass^2 / (4 sqrt(pi))
  CHECK(r.h1_seminorm == doctest::Approx(0.25 / (4.0 * std::sqrt(std::numbers::pi))).epsilon(1e-3));
  CHECK(r.dist_ref == 0.0);
}

TEST_CASE("momentum is mass weighted") {
  const VelocityGrid g(2, 64, 6.0);
  DensitySet f = testing::gaussian_density(g, 3, 3, 1.0, 0.5, 0.2);
  const DiagnosticsRow r = compute_row({0.0, f, 0.0, 0.0});
  CHECK(r.momentum[0] == doctest::Approx(3 * 0.2 * 1.0).epsilon(1e-10));
  CHECK(r.momentum[1] == doctest::Approx(3 * 0.2 * 1.0).epsilon(1e-10));
}

TEST_CASE("weighted L2 powers") {
  const VelocityGrid g(1, 8, 2.0);
  const DensitySet f = testing::random_density(g, 1, 1);
  DiagnosticsOptions opt;
  opt.weighted_l2_powers = {0, 3};
  const DiagnosticsRow r = compute_row({0.0, f, 0.0, 0.0}, nullptr, opt);
  double w3 = 0.0;
  for (std::size_t a = 0; a < g.size(); ++a) {
    w3 += f.level(1)[a] * f.level(1)[a] * std::pow(1.0 + g.speed_sq(a), 3.0) * g.spacing();
  }
  CHECK(r.weighted_l2[0] == doctest::Approx(r.l2_energy).epsilon(1e-14));
  CHECK(r.weighted_l2[1] == doctest::Approx(w3).epsilon(1e-13));
}

TEST_CASE("gradient energy is exact for linear and quadratic profiles") {
  const VelocityGrid g(1, 10, 1.0);
  std::vector<double> lin(10), quad(10);
  for (int i = 0; i < 10; ++i) {
    const double v = g.axis_center(i);
    lin[i] = 3.0 * v + 1.0;
    quad[i] = v * v;
  }
  CHECK(gradient_energy(lin, g) == doctest::Approx(9.0 * 10 * g.spacing()).epsilon(1e-13));
  double want = 0.0;
  for (int i = 0; i < 10; ++i) want += 4.0 * g.axis_center(i) * g.axis_center(i) * g.spacing();
  CHECK(gradient_energy(quad, g) == doctest::Approx(want).epsilon(1e-12));

  const VelocityGrid two(1, 2, 1.0);
  CHECK(gradient_energy(std::vector<double>{0.0, 1.0}, two) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("weighted L1 distance is a metric") {
  const VelocityGrid g(2, 10, 2.0);
  const DensitySet a = testing::random_density(g, 2, 1);
  const DensitySet b = testing::random_density(g, 2, 2);
  const DensitySet c = testing::random_density(g, 2, 3);
  for (int k : {0, 2}) {
    CHECK(weighted_l1_distance(a, a, k) == 0.0);
    CHECK(weighted_l1_distance(a, b, k) > 0.0);
    CHECK(weighted_l1_distance(a, b, k) == weighted_l1_distance(b, a, k));
    CHECK(weighted_l1_distance(a, c, k) <=
          weighted_l1_distance(a, b, k) + weighted_l1_distance(b, c, k));
  }
  CHECK(weighted_l1_distance(a, b, 0) < weighted_l1_distance(a, b, 2));
  CHECK_THROWS_AS(weighted_l1_distance(a, DensitySet(g, 3), 2), std::invalid_argument);
}

TEST_CASE("dist_ref uses the <v>^2 weight against the reference") {
  const VelocityGrid g(1, 16, 2.0);
  const DensitySet a = testing::random_density(g, 2, 4);
  const DensitySet b = testing::random_density(g, 2, 5);
  const DiagnosticsRow r = compute_row({0.0, a, 0.0, 0.0}, &b);
  CHECK(r.dist_ref == weighted_l1_distance(a, b, 2));
}
