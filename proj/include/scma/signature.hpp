#ifndef SCMA_SIGNATURE_HPP
#define SCMA_SIGNATURE_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scma/types.hpp"

namespace scma {

/// Fixed placement pattern of one spreading design. Cell (k, j) holds 0 for
/// an inactive resource or the 1-based index i of the complex weight z_i that
/// occupies it. Every user column has exactly N = 2 active cells and every
/// resource row has d_f.
struct SignatureTemplate {
  std::string name;
  int resources = 0;   // K
  int users = 0;       // J
  int superposed = 0;  // d_f
  std::vector<int> placement;  // K x J row-major, entries in 0..d_f

  int at(int k, int j) const { return placement[k * users + j]; }
  /// Row indices of user j's two active resources, ascending.
  std::array<int, 2> active_resources(int user) const;
};

/// Built-in templates "S4x6" (K=4, J=6, d_f=3) and "S5x10" (K=5, J=10,
/// d_f=4). Throws std::invalid_argument for unknown names, listing the
/// known ones.
SignatureTemplate builtin_template(std::string_view name);
std::vector<std::string> builtin_template_names();

/// 0/1 occupancy matrix (K x J row-major): 1 wherever placement is nonzero.
std::vector<int> indicator_matrix(const SignatureTemplate& t);

/// Length of the shortest cycle in the bipartite resource/user factor graph
/// of a binary occupancy matrix, or nullopt when the graph is acyclic.
/// Per-edge BFS: drop the edge, find the shortest remaining path between its
/// endpoints, add one.
std::optional<int> girth(const std::vector<int>& indicator, int resources,
                         int users);

/// Per-index energies E_i and phase rotations phi_i, one of each per z-index.
struct ResourceWeights {
  std::vector<double> energies;
  std::vector<double> phases;
};

/// K x J complex spreading matrix with entries z_i = sqrt(E_i/E) e^{j phi_i}
/// placed per the template, where E is the mother-constellation row energy.
struct SignatureMatrix {
  SignatureTemplate tmpl;
  ResourceWeights weights;
  double mc_energy = 0.0;
  std::vector<cplx> entries;  // K x J row-major

  cplx at(int k, int j) const { return entries[k * tmpl.users + j]; }
};

/// Validates that w.energies/w.phases have length d_f, every E_i > 0, and
/// the energies sum to the codebook budget implied by mc_energy's system
/// (checked by the caller via normalized_energy_target). Phases are accepted
/// anywhere in [0, pi); the optimizer applies the strict open interval.
SignatureMatrix build_signature(const SignatureTemplate& t,
                                const ResourceWeights& w, double mc_energy,
                                double energy_target_sum);

/// K x J matrix with E_i wherever the template places z_i, zero elsewhere.
std::vector<double> energy_matrix(const SignatureTemplate& t,
                                  const std::vector<double>& energies);

/// Power-imbalance predicate: true when the per-column energy totals are not
/// all equal across users, i.e. E_1 + E_3 != 2 E_2 for S4x6 and
/// E_1 + E_4 != E_2 + E_3 for S5x10.
bool is_power_imbalanced(const SignatureTemplate& t,
                         const std::vector<double>& energies);

/// Column compaction: diagonalize a signature column with exactly two nonzero
/// entries and drop the all-zero columns, giving the K x 2 spreading matrix.
std::vector<cplx> ezc(const std::vector<cplx>& column);

}  // namespace scma

#endif
