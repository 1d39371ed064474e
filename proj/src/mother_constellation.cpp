#include "scma/mother_constellation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace scma {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

MotherConstellation build_mc(int modulation_order, double omega) {
  if (!power_of_two(modulation_order) || modulation_order < 4) {
    throw std::invalid_argument("modulation order must be a power of two >= 4, got " +
                                std::to_string(modulation_order));
  }
  if (!(omega > 1.0)) {
    throw std::invalid_argument("ring parameter must exceed 1, got " +
                                std::to_string(omega));
  }

  const int m = modulation_order;
  const int half = m / 2;
  std::vector<double> amp(half);
  for (int i = 0; i < half; ++i) amp[i] = i * (omega - 1.0) + 1.0;

  MotherConstellation mc;
  mc.modulation_order = m;
  mc.omega = omega;
  for (auto& row : mc.rows) row.resize(m);
  // First halves; the second half of each row is the reversed, negated first
  // half, which makes columns m and M+1-m antipodal.
  for (int c = 0; c < half; ++c) {
    mc.rows[0][c] = amp[half - 1 - c];
    mc.rows[1][c] = c == 0 ? -amp[0] : amp[c];
  }
  for (int c = half; c < m; ++c) {
    mc.rows[0][c] = -mc.rows[0][m - 1 - c];
    mc.rows[1][c] = -mc.rows[1][m - 1 - c];
  }
  return mc;
}

double dimension_energy(int modulation_order, double omega) {
  const double m = modulation_order;
  const double d = omega - 1.0;
  return m * (m - 1.0) * (m - 2.0) * d * d / 12.0 + m * (m - 2.0) * d / 2.0 +
         m;
}

double mc_mpd_closed_form(int modulation_order, double omega) {
  const double m = modulation_order;
  const double lo = modulation_order > 4 ? 1.0 + 5.0 / 3.0 : 1.0;
  const double hi = m - 2.0 + std::sqrt((m - 3.0) * (m - 3.0) + 4.0);
  if (omega <= lo) return 4.0 * (omega - 1.0) * (omega - 1.0);
  if (omega <= hi) return omega * omega - 1.0;
  return (2.0 * m - 4.0) * (omega - 1.0) + 4.0;
}

double mc_mpd_brute_force(const MotherConstellation& mc) {
  const int m = mc.modulation_order;
  double best = 0.0;
  bool first = true;
  for (int p = 0; p < m; ++p) {
    for (int q = p + 1; q < m; ++q) {
      double prod = 1.0;
      bool differs = false;
      for (int r = 0; r < 2; ++r) {
        const double d = std::abs(mc.rows[r][p] - mc.rows[r][q]);
        if (d > 0.0) {
          prod *= d;
          differs = true;
        }
      }
      if (!differs) return 0.0;  // duplicate columns
      if (first || prod < best) {
        best = prod;
        first = false;
      }
    }
  }
  return best;
}

}  // namespace scma
