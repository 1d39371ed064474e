#ifndef SCMA_MOTHER_CONSTELLATION_HPP
#define SCMA_MOTHER_CONSTELLATION_HPP

#include <array>
#include <vector>

namespace scma {

/// Star-QAM mother constellation: a real 2 x M matrix controlled by a single
/// ring parameter omega > 1. Ring amplitudes are w_i = (i-1)(omega-1) + 1 for
/// i = 1..M/2; the two rows arrange them so that column m and column M+1-m
/// are antipodal and both rows carry the same energy.
struct MotherConstellation {
  int modulation_order = 0;  // M, power of two, >= 4
  double omega = 0.0;
  std::array<std::vector<double>, 2> rows;

  double at(int row, int col) const { return rows[row][col]; }
};

/// Throws std::invalid_argument unless M is a power of two >= 4 and omega > 1.
MotherConstellation build_mc(int modulation_order, double omega);

/// Energy of either row:
///   E = M(M-1)(M-2)(omega-1)^2/12 + M(M-2)(omega-1)/2 + M.
double dimension_energy(int modulation_order, double omega);

/// Published piecewise closed form for the minimum product distance of the
/// mother constellation. Exact for M = 4; for larger M the brute-force value
/// below is authoritative and this form is kept verbatim for reporting (it
/// can exceed the true minimum, e.g. adjacent interior columns realize a
/// (omega-1)^2 product the piecewise bound misses).
double mc_mpd_closed_form(int modulation_order, double omega);

/// Exact minimum product distance by enumerating all column pairs: for each
/// pair, the product of |difference| over the rows where the entries differ.
double mc_mpd_brute_force(const MotherConstellation& mc);

}  // namespace scma

#endif
