#ifndef SCMA_METRICS_HPP
#define SCMA_METRICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/mother_constellation.hpp"
#include "scma/signature.hpp"
#include "scma/types.hpp"

namespace scma {

enum class MedAlgorithm {
  Auto,             // DifferenceSweep
  DifferenceSweep,  // branch-and-bound over per-user codeword differences
  PairSweep,        // literal scan of all unordered codeword pairs
};

struct MedOptions {
  MedAlgorithm algorithm = MedAlgorithm::Auto;
  std::uint64_t max_points = kDefaultEnumerationCap;
  int threads = 0;  // <=0: all hardware threads
};

struct MedEstimate {
  double value = 0.0;
  std::string method;  // "exact" or "monte_carlo"
  std::uint64_t pairs_examined = 0;
  // Monte Carlo parameters (zero for exact)
  int samples_per_batch = 0;
  int batches = 0;
  std::uint64_t seed = 0;
  // Collision diagnostics: degenerate means two distinct index tuples map to
  // the same superimposed point, i.e. the MED is exactly zero.
  bool degenerate = false;
  std::optional<std::array<std::vector<int>, 2>> colliding_pair;
};

/// Minimum Euclidean distance between distinct points of the superimposed
/// constellation, by exhaustive search. Throws BudgetError when M^J is not
/// strictly below opts.max_points.
MedEstimate med_exact(const CodebookSet& cs, const MedOptions& opts = {});

/// Sampled estimate: t_max batches of Q random tuple pairs, identical points
/// skipped, minimum over every batch. Upper-bounds the exact MED.
MedEstimate med_monte_carlo(const CodebookSet& cs, int samples_per_batch,
                            int batches, std::uint64_t seed,
                            int threads = 0);

struct CodebookMpd {
  double value = 0.0;
  bool degenerate = false;  // repeated codeword inside one codebook
};

/// Minimum pairwise distance within one user's codebook.
CodebookMpd codebook_mpd(const Codebook& cb);

struct MpdReport {
  std::vector<double> per_user;
  double system = 0.0;  // min over users
  bool degenerate = false;
  std::optional<double> closed_form;  // filled when a design point is known
};

MpdReport mpd_report(const CodebookSet& cs);

/// Template-specific closed form for the system MPD of a built set, used as
/// the cheap feasibility gate inside the optimizer. Both built-in templates
/// assign indices so that each resource superposes weights whose pairwise
/// energy products are covered by the returned min.
double gamma_mpd_closed_form(const SignatureTemplate& t,
                             const std::vector<double>& energies,
                             int modulation_order, double omega);

}  // namespace scma

#endif
