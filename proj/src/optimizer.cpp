#include "scma/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scma/parallel.hpp"
#include "scma/rng.hpp"

namespace scma {

namespace {

// Genome layout: d_f raw energies, d_f phases, omega. Raw energies are
// meaningful only up to scale; decoding projects them onto the sum target.
struct Box {
  double energy_lo, energy_hi;
  double phase_lo, phase_hi;
  double omega_lo, omega_hi;
  int superposed;

  double width(int gene) const {
    if (gene < superposed) return energy_hi - energy_lo;
    if (gene < 2 * superposed) return phase_hi - phase_lo;
    return omega_hi - omega_lo;
  }
  double lo(int gene) const {
    if (gene < superposed) return energy_lo;
    if (gene < 2 * superposed) return phase_lo;
    return omega_lo;
  }
  double hi(int gene) const {
    if (gene < superposed) return energy_hi;
    if (gene < 2 * superposed) return phase_hi;
    return omega_hi;
  }
};

Box make_box(const SignatureTemplate& t, int modulation_order,
             const GaConfig& cfg) {
  const double target =
      static_cast<double>(modulation_order) * t.users / t.resources;
  Box box;
  box.superposed = t.superposed;
  // open lower bounds, nudged inward so decoded points stay strictly valid
  box.energy_lo = 1e-6 * target;
  box.energy_hi = target;
  box.phase_lo = 1e-9;
  box.phase_hi = std::numbers::pi - 1e-9;
  box.omega_lo = 1.0 + 1e-6;
  box.omega_hi = cfg.omega_max;
  return box;
}

DesignPoint decode(const std::vector<double>& genome, const Box& box,
                   double target) {
  const int df = box.superposed;
  DesignPoint dp;
  dp.energies = project_energies(
      std::vector<double>(genome.begin(), genome.begin() + df), target);
  dp.phases.assign(genome.begin() + df, genome.begin() + 2 * df);
  dp.omega = genome[2 * df];
  return dp;
}

// Feasible candidates rank by MED; infeasible ones rank below every feasible
// candidate and among themselves by MPD, which pulls early populations
// toward the constraint region.
bool better(const CandidateScore& x, const CandidateScore& y) {
  if (x.feasible != y.feasible) return x.feasible;
  return x.feasible ? x.med > y.med : x.mpd > y.mpd;
}

}  // namespace

std::vector<double> project_energies(const std::vector<double>& raw,
                                     double target_sum) {
  double sum = 0.0;
  for (double v : raw) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("raw energies must be positive");
    }
    sum += v;
  }
  std::vector<double> scaled(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    scaled[i] = raw[i] * target_sum / sum;
  }
  return scaled;
}

CandidateScore evaluate_candidate(const SignatureTemplate& t,
                                  const DesignPoint& dp, int modulation_order,
                                  const GaConfig& cfg) {
  CandidateScore score;
  score.mpd =
      gamma_mpd_closed_form(t, dp.energies, modulation_order, dp.omega);
  if (score.mpd < cfg.kappa) return score;  // skip the expensive MED
  score.feasible = true;

  const CodebookSet cs = build_codebooks(t, dp, modulation_order);
  if (cfg.med_method == MedMethod::Exact) {
    MedOptions opts;
    opts.threads = cfg.threads;
    score.med = med_exact(cs, opts).value;
  } else {
    score.med = med_monte_carlo(cs, cfg.mc_samples, cfg.mc_batches, cfg.seed,
                                cfg.threads)
                    .value;
  }
  return score;
}

OptimizationResult ga_optimize(const SignatureTemplate& t,
                               int modulation_order, const GaConfig& cfg) {
  if (cfg.population < 2) {
    throw std::invalid_argument("population must hold at least 2 candidates");
  }
  if (cfg.generations < 1) {
    throw std::invalid_argument("need at least 1 generation");
  }
  if (cfg.elitism_count < 0 || cfg.elitism_count >= cfg.population) {
    throw std::invalid_argument("elite count must be in [0, population)");
  }
  if (!(cfg.omega_max > 1.0)) {
    throw std::invalid_argument("omega ceiling must exceed 1");
  }

  const Box box = make_box(t, modulation_order, cfg);
  const double target =
      static_cast<double>(modulation_order) * t.users / t.resources;
  const int genes = 2 * t.superposed + 1;

  std::vector<std::vector<double>> population(cfg.population);
  std::vector<CandidateScore> scores(cfg.population);

  // Evolution draws come from one serial stream per generation; evaluations
  // are pure functions of the genome, so they can run on any worker split
  // without changing the outcome.
  const auto evaluate_all = [&]() {
    parallel_chunks(static_cast<std::uint64_t>(cfg.population), cfg.threads,
                    [&](int, std::uint64_t begin, std::uint64_t end) {
                      for (std::uint64_t i = begin; i < end; ++i) {
                        scores[i] = evaluate_candidate(
                            t, decode(population[i], box, target),
                            modulation_order, cfg);
                      }
                    });
  };

  {
    auto gen = derive_stream(cfg.seed, 0);
    for (auto& genome : population) {
      genome.resize(genes);
      for (int g = 0; g < genes; ++g) {
        genome[g] = uniform_range(gen, box.lo(g), box.hi(g));
      }
    }
  }
  evaluate_all();

  OptimizationResult result;
  result.evaluations = cfg.population;
  int best_index = 0;
  for (int i = 1; i < cfg.population; ++i) {
    if (better(scores[i], scores[best_index])) best_index = i;
  }
  std::vector<double> best_genome = population[best_index];
  CandidateScore best_score = scores[best_index];
  result.history.push_back(best_score.feasible ? best_score.med : 0.0);

  for (int generation = 1; generation < cfg.generations; ++generation) {
    auto gen = derive_stream(cfg.seed, static_cast<std::uint64_t>(generation));

    std::vector<int> ranking(cfg.population);
    for (int i = 0; i < cfg.population; ++i) ranking[i] = i;
    std::sort(ranking.begin(), ranking.end(), [&](int a, int b) {
      if (better(scores[a], scores[b])) return true;
      if (better(scores[b], scores[a])) return false;
      return a < b;
    });

    const auto tournament = [&]() -> const std::vector<double>& {
      const auto a = uniform_below(
          gen, static_cast<std::uint64_t>(cfg.population));
      const auto b = uniform_below(
          gen, static_cast<std::uint64_t>(cfg.population));
      return population[better(scores[b], scores[a]) ? b : a];
    };

    std::vector<std::vector<double>> next;
    next.reserve(cfg.population);
    for (int e = 0; e < cfg.elitism_count; ++e) {
      next.push_back(population[ranking[e]]);
    }
    while (static_cast<int>(next.size()) < cfg.population) {
      const auto& pa = tournament();
      const auto& pb = tournament();
      std::vector<double> child = pa;
      if (uniform_unit(gen) < cfg.crossover_rate) {
        for (int g = 0; g < genes; ++g) {
          if (uniform_unit(gen) < 0.5) child[g] = pb[g];
        }
      }
      for (int g = 0; g < genes; ++g) {
        if (uniform_unit(gen) < cfg.mutation_rate) {
          child[g] += standard_normal(gen) * cfg.mutation_scale * box.width(g);
          child[g] = std::clamp(child[g], box.lo(g), box.hi(g));
        }
      }
      next.push_back(std::move(child));
    }

    population = std::move(next);
    evaluate_all();
    result.evaluations += cfg.population;

    for (int i = 0; i < cfg.population; ++i) {
      if (better(scores[i], best_score)) {
        best_score = scores[i];
        best_genome = population[i];
      }
    }
    result.history.push_back(best_score.feasible ? best_score.med : 0.0);
  }

  result.best = decode(best_genome, box, target);
  result.best_med = best_score.feasible ? best_score.med : 0.0;
  result.best_mpd = best_score.mpd;
  result.feasible_found = best_score.feasible;
  return result;
}

}  // namespace scma
