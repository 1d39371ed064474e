#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "scma/mother_constellation.hpp"

using namespace scma;

namespace {

// Test-side oracle: literal pairwise product-distance scan, written
// independently of the library enumeration.
double local_mpd(const MotherConstellation& mc) {
  const int m = mc.modulation_order;
  double best = 1e300;
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      const double d0 = std::abs(mc.rows[0][p] - mc.rows[0][q]);
      const double d1 = std::abs(mc.rows[1][p] - mc.rows[1][q]);
      double prod = 1.0;
      if (d0 > 0.0) prod *= d0;
      if (d1 > 0.0) prod *= d1;
      if (d0 == 0.0 && d1 == 0.0) return 0.0;
      best = std::min(best, prod);
    }
  }
  return best;
}

double row_energy(const MotherConstellation& mc, int row) {
  double e = 0.0;
  for (double v : mc.rows[row]) e += v * v;
  return e;
}

const std::vector<double>& omega_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g{1.01};
    for (double w = 1.1; w < 10.0 + 1e-9; w += 0.1) g.push_back(w);
    return g;
  }();
  return grid;
}

}  // namespace

TEST_SUITE("mother-constellation") {

TEST_CASE("4-point rows take the documented form") {
  const double omega = 2.0;
  const auto mc = build_mc(4, omega);
  const std::vector<double> r0{omega, 1.0, -1.0, -omega};
  const std::vector<double> r1{-1.0, omega, -omega, 1.0};
  CHECK(mc.rows[0] == r0);
  CHECK(mc.rows[1] == r1);
}

TEST_CASE("columns m and M-1-m are antipodal for every order") {
  for (int m : {4, 8, 16, 32}) {
    for (double omega : {1.3, 2.0, 5.5}) {
      const auto mc = build_mc(m, omega);
      for (int c = 0; c < m; ++c) {
        CHECK(mc.rows[0][c] == -mc.rows[0][m - 1 - c]);
        CHECK(mc.rows[1][c] == -mc.rows[1][m - 1 - c]);
      }
    }
  }
}

TEST_CASE("each row holds every ring amplitude exactly twice") {
  for (int m : {4, 8, 16}) {
    const double omega = 3.0;
    const auto mc = build_mc(m, omega);
    for (int row = 0; row < 2; ++row) {
      std::vector<double> mags;
      for (double v : mc.rows[row]) mags.push_back(std::abs(v));
      std::sort(mags.begin(), mags.end());
      for (int i = 0; i < m / 2; ++i) {
        const double amp = i * (omega - 1.0) + 1.0;
        CHECK(mags[2 * i] == doctest::Approx(amp).epsilon(1e-15));
        CHECK(mags[2 * i + 1] == doctest::Approx(amp).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("row energies match the closed-form energy") {
  for (int m : {4, 8, 16, 32}) {
    for (double omega : omega_grid()) {
      const auto mc = build_mc(m, omega);
      const double expected = dimension_energy(m, omega);
      CHECK(row_energy(mc, 0) ==
            doctest::Approx(expected).epsilon(1e-12));
      CHECK(row_energy(mc, 1) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("energy formula spot values") {
  // M=4: 2(w-1)^2 + 4(w-1) + 4.
  CHECK(dimension_energy(4, 2.0) == doctest::Approx(10.0));
  CHECK(dimension_energy(4, 3.0) == doctest::Approx(20.0));
  // As omega -> 1 the rings collapse onto the unit circle: E -> M.
  CHECK(dimension_energy(8, 1.0 + 1e-12) == doctest::Approx(8.0));
}

TEST_CASE("invalid orders and ring parameters are rejected") {
  CHECK_THROWS_AS(build_mc(3, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mc(2, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mc(0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mc(12, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mc(4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mc(4, 0.5), std::invalid_argument);
}

TEST_CASE("brute-force product distance agrees with a local scan") {
  for (int m : {4, 8, 16}) {
    for (double omega : {1.05, 1.8, 2.0, 4.0, 9.0}) {
      const auto mc = build_mc(m, omega);
      CHECK(mc_mpd_brute_force(mc) ==
            doctest::Approx(local_mpd(mc)).epsilon(1e-12));
    }
  }
}

TEST_CASE("4-point product distance at omega=2 is 3 by hand enumeration") {
  // Columns (2,-1),(1,2),(-1,-2),(-2,1): the tight pairs give 1*3 = 3.
  const auto mc = build_mc(4, 2.0);
  CHECK(mc_mpd_brute_force(mc) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(mc_mpd_closed_form(4, 2.0) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("closed form is exact at M=4 across the omega grid") {
  for (double omega : omega_grid()) {
    const auto mc = build_mc(4, omega);
    const double brute = mc_mpd_brute_force(mc);
    const double closed = mc_mpd_closed_form(4, omega);
    CHECK(std::abs(closed - brute) <= 1e-9 * brute);
  }
}

TEST_CASE("closed form upper-bounds brute force for M=8 and M=16") {
  for (int m : {8, 16}) {
    int strict = 0;
    double worst_gap = 0.0;
    for (double omega : omega_grid()) {
      const auto mc = build_mc(m, omega);
      const double brute = mc_mpd_brute_force(mc);
      const double closed = mc_mpd_closed_form(m, omega);
      CHECK(brute <= closed + 1e-12);
      if (closed - brute > 1e-12) {
        ++strict;
        worst_gap = std::max(worst_gap, closed - brute);
      }
    }
    // Adjacent interior columns realize (omega-1)^2, which the piecewise
    // form misses for larger orders, so strict gaps are expected.
    MESSAGE("M=", m, ": ", strict, " grid points with closed > brute, max gap ",
            worst_gap);
    CHECK(strict > 0);
  }
}

TEST_CASE("closed-form branch structure") {
  // The upper breakpoint is a true crossover: omega^2 - 1 meets
  // (2M-4)(omega-1) + 4 exactly at M-2+sqrt((M-3)^2+4).
  for (int m : {4, 8, 16}) {
    const double hi = m - 2.0 + std::sqrt((m - 3.0) * (m - 3.0) + 4.0);
    const double below = mc_mpd_closed_form(m, hi - 1e-9);
    const double above = mc_mpd_closed_form(m, hi + 1e-9);
    CHECK(std::abs(below - above) < 1e-6);
    CHECK(mc_mpd_closed_form(m, hi) ==
          doctest::Approx(hi * hi - 1.0).epsilon(1e-12));
  }
  // For M=4 the first branch is empty: the quadratic applies from omega=1+.
  CHECK(mc_mpd_closed_form(4, 1.0 + 1e-9) ==
        doctest::Approx(0.0).epsilon(1e-6));
  CHECK(mc_mpd_closed_form(4, 1.5) == doctest::Approx(1.25));
  // For M>4 the first branch runs to 1+5/3 and takes 4(omega-1)^2 there.
  CHECK(mc_mpd_closed_form(8, 2.0) == doctest::Approx(4.0));
  CHECK(mc_mpd_closed_form(8, 1.0 + 5.0 / 3.0) ==
        doctest::Approx(4.0 * (5.0 / 3.0) * (5.0 / 3.0)).epsilon(1e-12));
  // Deep ring separation lands on the linear branch.
  CHECK(mc_mpd_closed_form(4, 9.0) == doctest::Approx(4.0 * 8.0 + 4.0));
}

}  // TEST_SUITE
