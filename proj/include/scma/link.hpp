#ifndef SCMA_LINK_HPP
#define SCMA_LINK_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/rng.hpp"
#include "scma/types.hpp"

namespace scma {

enum class ChannelKind { Awgn, Rayleigh };
enum class DecoderKind { Mpa, Ml };
enum class BitMapping { Gray, Natural };
enum class MpaDomain { Log, Probability };

struct MpaConfig {
  int iterations = 8;
  double damping = 0.0;  // 0: pure replacement
  MpaDomain domain = MpaDomain::Log;
};

struct MpaResult {
  std::vector<double> posteriors;  // J x M row-major, rows sum to 1
  std::vector<int> decisions;      // argmax per user
  double posterior(int user, int m) const;
};

/// Downlink message-passing receiver on the resource/user factor graph of a
/// codebook set. The factor-node update marginalizes the superposition of
/// the d_f users on each resource, so one decode costs
/// O(iterations * K * d_f * M^d_f).
class MpaDecoder {
 public:
  MpaDecoder(const CodebookSet& cs, const MpaConfig& cfg = {});

  /// y: K received samples; h: K per-resource gains; sigma2: per-complex-
  /// dimension noise variance.
  MpaResult decode(std::span<const cplx> y, std::span<const cplx> h,
                   double sigma2) const;

  const MpaConfig& config() const { return cfg_; }

 private:
  struct Resource {
    std::vector<int> users;           // users active here (size d_f)
    std::vector<cplx> points;         // M^d_f precomputed superpositions
  };

  const CodebookSet* cs_;
  MpaConfig cfg_;
  std::vector<Resource> resources_;
  std::vector<std::array<int, 2>> user_edges_;  // user -> its two resources
};

/// Exhaustive maximum-likelihood tuple search (budget-guarded); ties broken
/// toward the lexicographically smallest tuple.
class MlDecoder {
 public:
  explicit MlDecoder(const CodebookSet& cs,
                     std::uint64_t cap = kDefaultEnumerationCap);

  std::vector<int> decode(std::span<const cplx> y,
                          std::span<const cplx> h) const;

 private:
  int users_;
  int resources_;
  int modulation_order_;
  std::vector<cplx> points_;  // M^J x K row-major
};

/// Noiseless superimposed signal for one tuple through per-resource gains.
std::vector<cplx> transmit(const CodebookSet& cs, std::span<const int> indices,
                           std::span<const cplx> h);

struct SweepConfig {
  std::vector<double> ebn0_db;
  ChannelKind channel = ChannelKind::Awgn;
  DecoderKind decoder = DecoderKind::Mpa;
  MpaConfig mpa;
  BitMapping mapping = BitMapping::Gray;
  std::uint64_t min_errors = 200;       // aggregate stop target per point
  std::uint64_t min_errors_per_user = 0;  // 0: aggregate only
  std::uint64_t max_bits = 100000000;   // per point, per user
  std::uint64_t seed = 1;
  int threads = 0;
};

struct BerPoint {
  double ebn0_db = 0.0;
  std::uint64_t bits = 0;    // per user
  std::uint64_t errors = 0;  // summed over users
  double ber = 0.0;
  std::vector<std::uint64_t> user_errors;
  std::vector<double> user_ber;
};

struct BerCurve {
  SweepConfig config;
  std::vector<BerPoint> points;
};

/// Map a symbol index to its log2(M) data bits and back.
int bits_to_symbol(std::span<const int> bits, BitMapping mapping);
void symbol_to_bits(int symbol, int bits_per_symbol, BitMapping mapping,
                    std::span<int> out);

/// Per-complex-dimension noise variance at a given Eb/N0 for unit codeword
/// energy and log2(M) bits per codeword.
double noise_variance(double ebn0_db, int modulation_order);

/// Monte Carlo downlink BER: every user draws a fresh symbol per trial, the
/// superposition passes through the channel (fresh unit-variance Rayleigh
/// gains per trial when selected, perfect CSI at the receiver), and bit
/// errors are counted against the decoder output. Trials are indexed
/// deterministically so results do not depend on the thread count.
BerCurve ber_sweep(const CodebookSet& cs, const SweepConfig& cfg);

/// CSV: header ebn0_db,bits,errors,ber,user1_ber,...,userJ_ber.
void save_ber_csv(const BerCurve& curve, const std::filesystem::path& path);
/// JSON sidecar with the sweep configuration and per-point counters.
void save_ber_json(const BerCurve& curve, const std::filesystem::path& path);

}  // namespace scma

#endif
