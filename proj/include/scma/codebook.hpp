#ifndef SCMA_CODEBOOK_HPP
#define SCMA_CODEBOOK_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scma/mother_constellation.hpp"
#include "scma/signature.hpp"
#include "scma/types.hpp"

namespace scma {

/// One user's K x M codebook. Exactly two rows are nonzero; each is one
/// mother-constellation row scaled by that user's z weight.
struct Codebook {
  int user_index = 0;  // 0-based
  int resources = 0;   // K
  int modulation_order = 0;  // M
  std::array<int, 2> active_resources{};
  std::vector<cplx> entries;  // K x M row-major

  cplx at(int k, int m) const { return entries[k * modulation_order + m]; }
  /// Codeword m as a K-vector (column m).
  std::vector<cplx> codeword(int m) const;
};

enum class Provenance { Generated, Reference, Loaded };

/// The free design variables: per-index energies and phases plus the ring
/// parameter omega.
struct DesignPoint {
  std::vector<double> energies;
  std::vector<double> phases;
  double omega = 0.0;
};

struct CodebookSet {
  int modulation_order = 0;  // M
  int users = 0;             // J
  int resources = 0;         // K
  int nonzero_dims = 2;      // N
  int superposed = 0;        // d_f (0 when not derived from a template)
  std::vector<Codebook> codebooks;
  Provenance provenance = Provenance::Generated;
  std::string provenance_detail;
  std::optional<std::string> template_name;
  std::optional<DesignPoint> design_point;
};

/// Structural invariants every set must satisfy: consistent dimensions,
/// exactly two nonzero rows per user (matching the template when one is
/// named), and total energy MJ within 2% relative. Throws ValidationError
/// naming the first violated invariant.
void validate_codebook_set(const CodebookSet& cs);

/// Assemble the J per-user codebooks from a signature matrix and a mother
/// constellation sharing the same M. Verifies the built set's per-dimension
/// and total energy identities.
CodebookSet build_codebooks(const SignatureMatrix& sig,
                            const MotherConstellation& mc);

/// Convenience: template + design point + M -> codebook set.
CodebookSet build_codebooks(const SignatureTemplate& t, const DesignPoint& dp,
                            int modulation_order);

/// Sum over users and codewords of the squared codeword norm; MJ for a
/// normalized set.
double total_energy(const CodebookSet& cs);

/// Superimposed codeword for one index tuple (0-based, one per user).
std::vector<cplx> superimpose(const CodebookSet& cs,
                              std::span<const int> indices);

/// M^J, or nullopt on overflow past 2^63.
std::optional<std::uint64_t> superimposed_count(const CodebookSet& cs);

/// Throws BudgetError unless M^J is strictly below the cap.
void require_enumeration_budget(const CodebookSet& cs, std::uint64_t cap);

/// Lexicographic walk over all M^J index tuples with the running superimposed
/// vector maintained incrementally (only the digits that roll over get
/// re-added, so a full sweep is O(M^J) column updates, not O(M^J * J)).
class SuperimposedEnumerator {
 public:
  explicit SuperimposedEnumerator(const CodebookSet& cs,
                                  std::uint64_t cap = kDefaultEnumerationCap);

  std::uint64_t count() const { return count_; }
  const std::vector<int>& indices() const { return indices_; }
  const std::vector<cplx>& vector() const { return sum_; }

  /// Advance to the next tuple; false once the enumeration is exhausted.
  bool next();

 private:
  const CodebookSet* cs_;
  std::uint64_t count_ = 0;
  std::vector<int> indices_;
  std::vector<cplx> sum_;
};

/// Verbatim published reference sets: "A_4x6_M4" (M=4, J=6, K=4) and
/// "B_5x10_M4" (M=4, J=10, K=5). Entries carry the 4-decimal precision of
/// the source tables. Throws std::invalid_argument for unknown ids.
CodebookSet reference_codebooks(std::string_view id);
std::vector<std::string> reference_ids();

/// JSON file format "scma-codebook/1": dimensions, provenance, optional
/// template name and design point, and the J x K x M entries as [re, im]
/// pairs. Load validates structural invariants (two nonzero rows per user,
/// template consistency when named, total energy MJ within 2% relative) and
/// throws ValidationError naming the failed invariant.
void save_codebooks(const CodebookSet& cs, const std::filesystem::path& path);
CodebookSet load_codebooks(const std::filesystem::path& path);

/// Recover (E, phi, omega) from a set whose codebooks follow a template
/// (e.g. the reference sets): omega from within-row magnitude ratios, z_i
/// from the unit-amplitude column of each row carrying index i, energies as
/// squared row norms. Estimates are averaged over all occurrences of each
/// index.
DesignPoint fit_design_point(const CodebookSet& cs,
                             const SignatureTemplate& t);

}  // namespace scma

#endif
