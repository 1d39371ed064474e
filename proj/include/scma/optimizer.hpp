#ifndef SCMA_OPTIMIZER_HPP
#define SCMA_OPTIMIZER_HPP

#include <cstdint>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/metrics.hpp"
#include "scma/signature.hpp"
#include "scma/types.hpp"

namespace scma {

enum class MedMethod { Exact, MonteCarlo };

struct GaConfig {
  int population = 50;
  int generations = 50;
  double kappa = 0.54;  // MPD feasibility threshold
  MedMethod med_method = MedMethod::Exact;
  int mc_samples = 5000;  // per batch, Monte Carlo only
  int mc_batches = 20;
  std::uint64_t seed = 1;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;      // per-gene probability
  double mutation_scale = 0.05;    // std dev as a fraction of the box width
  int elitism_count = 2;
  double omega_max = 10.0;
  int threads = 0;
};

struct CandidateScore {
  double med = 0.0;
  double mpd = 0.0;  // closed form
  bool feasible = false;
};

/// Scale raw positive energies so they sum to the per-dimension target
/// MJ/K. Throws std::invalid_argument when any raw value is <= 0.
std::vector<double> project_energies(const std::vector<double>& raw,
                                     double target_sum);

/// Fitness of one design point: closed-form MPD gate first; the MED (the
/// expensive part) is only computed for feasible candidates and is zero
/// otherwise.
CandidateScore evaluate_candidate(const SignatureTemplate& t,
                                  const DesignPoint& dp, int modulation_order,
                                  const GaConfig& cfg);

struct OptimizationResult {
  DesignPoint best;
  double best_med = 0.0;
  double best_mpd = 0.0;
  bool feasible_found = false;
  std::vector<double> history;  // best-so-far MED, one entry per generation
  std::uint64_t evaluations = 0;
};

/// Genetic search over (E_1..E_df, phi_1..phi_df, omega): tournament
/// selection, uniform crossover, Gaussian mutation, elitism. Energies are
/// projected onto the sum constraint after every variation. When no feasible
/// candidate was ever seen the returned best maximizes MPD instead and
/// feasible_found is false.
OptimizationResult ga_optimize(const SignatureTemplate& t,
                               int modulation_order, const GaConfig& cfg);

}  // namespace scma

#endif
