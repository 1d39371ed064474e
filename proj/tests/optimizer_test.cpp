#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/metrics.hpp"
#include "scma/optimizer.hpp"
#include "scma/signature.hpp"

using namespace scma;

TEST_SUITE("optimizer") {

TEST_CASE("energy projection rescales onto the sum constraint") {
  const auto p = project_energies({1.0, 2.0, 3.0}, 6.0);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(2.0));
  CHECK(p[2] == doctest::Approx(3.0));

  const auto q = project_energies({0.2, 0.2, 0.1}, 8.0);
  CHECK(q[0] + q[1] + q[2] == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(q[0] == doctest::Approx(q[1]).epsilon(1e-12));
  CHECK(q[0] == doctest::Approx(2.0 * q[2]).epsilon(1e-12));

  // Idempotence: projecting a projected vector is a no-op.
  const auto r = project_energies(q, 8.0);
  for (int i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(q[i]).epsilon(1e-14));

  CHECK_THROWS_AS(project_energies({1.0, 0.0, 2.0}, 6.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(project_energies({1.0, -0.5, 2.0}, 6.0),
                  std::invalid_argument);
}

TEST_CASE("candidate evaluation gates on the closed-form floor") {
  const auto t = builtin_template("S4x6");
  const auto ref = reference_codebooks("A_4x6_M4");
  auto dp = fit_design_point(ref, t);
  dp.energies = project_energies(dp.energies, 6.0);

  GaConfig cfg;
  cfg.kappa = 0.54;
  const auto score = evaluate_candidate(t, dp, 4, cfg);
  CHECK(score.feasible);
  CHECK(score.mpd == doctest::Approx(0.5492).epsilon(2e-3));
  CHECK(score.med == doctest::Approx(1.1387).epsilon(5e-3));

  // A floor just above this point's MPD flips it infeasible; the MED is
  // then skipped entirely.
  cfg.kappa = 0.56;
  const auto blocked = evaluate_candidate(t, dp, 4, cfg);
  CHECK_FALSE(blocked.feasible);
  CHECK(blocked.med == 0.0);
  CHECK(blocked.mpd == doctest::Approx(score.mpd).epsilon(1e-12));
}

TEST_CASE("small searches are reproducible and thread-invariant") {
  const auto t = builtin_template("S4x6");
  GaConfig cfg;
  cfg.population = 10;
  cfg.generations = 5;
  cfg.seed = 9;

  const auto r1 = ga_optimize(t, 4, cfg);
  const auto r2 = ga_optimize(t, 4, cfg);
  CHECK(r1.best_med == r2.best_med);
  CHECK(r1.best_mpd == r2.best_mpd);
  CHECK(r1.history == r2.history);
  REQUIRE(r1.best.energies.size() == r2.best.energies.size());
  for (std::size_t i = 0; i < r1.best.energies.size(); ++i) {
    CHECK(r1.best.energies[i] == r2.best.energies[i]);
    CHECK(r1.best.phases[i] == r2.best.phases[i]);
  }
  CHECK(r1.best.omega == r2.best.omega);

  cfg.threads = 1;
  const auto serial = ga_optimize(t, 4, cfg);
  cfg.threads = 2;
  const auto dual = ga_optimize(t, 4, cfg);
  CHECK(serial.best_med == dual.best_med);
  CHECK(serial.history == dual.history);
}

TEST_CASE("history is one best-so-far entry per generation, non-decreasing") {
  const auto t = builtin_template("S4x6");
  GaConfig cfg;
  cfg.population = 12;
  cfg.generations = 8;
  cfg.seed = 4;
  const auto r = ga_optimize(t, 4, cfg);
  REQUIRE(static_cast<int>(r.history.size()) == cfg.generations);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i] >= r.history[i - 1]);
  }
  CHECK(r.evaluations ==
        static_cast<std::uint64_t>(cfg.population) * cfg.generations);
  if (r.feasible_found) {
    CHECK(r.history.back() == doctest::Approx(r.best_med).epsilon(1e-12));
  }
}

TEST_CASE("returned design point respects the search box") {
  const auto t = builtin_template("S5x10");
  GaConfig cfg;
  cfg.population = 8;
  cfg.generations = 4;
  cfg.seed = 11;
  cfg.omega_max = 6.0;
  const auto r = ga_optimize(t, 4, cfg);

  REQUIRE(r.best.energies.size() == 4);
  double sum = 0.0;
  for (double e : r.best.energies) {
    CHECK(e > 0.0);
    sum += e;
  }
  CHECK(sum == doctest::Approx(8.0).epsilon(1e-9));  // MJ/K = 4*10/5
  for (double phi : r.best.phases) {
    CHECK(phi > 0.0);
    CHECK(phi < std::numbers::pi);
  }
  CHECK(r.best.omega > 1.0);
  CHECK(r.best.omega <= cfg.omega_max);
}

TEST_CASE("an unreachable floor reports infeasibility, best by MPD") {
  // The closed-form MPD of any point in the box tops out well below 1, so
  // kappa = 5 can never be met.
  const auto t = builtin_template("S4x6");
  GaConfig cfg;
  cfg.population = 8;
  cfg.generations = 3;
  cfg.kappa = 5.0;
  cfg.seed = 2;
  const auto r = ga_optimize(t, 4, cfg);
  CHECK_FALSE(r.feasible_found);
  CHECK(r.best_med == 0.0);
  CHECK(r.best_mpd > 0.0);
  for (double h : r.history) CHECK(h == 0.0);
}

TEST_CASE("sampled-MED scoring works and stays deterministic") {
  const auto t = builtin_template("S4x6");
  GaConfig cfg;
  cfg.population = 6;
  cfg.generations = 2;
  cfg.med_method = MedMethod::MonteCarlo;
  cfg.mc_samples = 300;
  cfg.mc_batches = 2;
  cfg.seed = 7;
  const auto r1 = ga_optimize(t, 4, cfg);
  const auto r2 = ga_optimize(t, 4, cfg);
  CHECK(r1.best_med == r2.best_med);
  CHECK(r1.feasible_found);
}

TEST_CASE("configuration validation") {
  const auto t = builtin_template("S4x6");
  GaConfig cfg;
  cfg.population = 1;
  CHECK_THROWS_AS(ga_optimize(t, 4, cfg), std::invalid_argument);
  cfg = {};
  cfg.generations = 0;
  CHECK_THROWS_AS(ga_optimize(t, 4, cfg), std::invalid_argument);
  cfg = {};
  cfg.elitism_count = cfg.population;
  CHECK_THROWS_AS(ga_optimize(t, 4, cfg), std::invalid_argument);
  cfg = {};
  cfg.elitism_count = -1;
  CHECK_THROWS_AS(ga_optimize(t, 4, cfg), std::invalid_argument);
  cfg = {};
  cfg.omega_max = 1.0;
  CHECK_THROWS_AS(ga_optimize(t, 4, cfg), std::invalid_argument);
}

}  // TEST_SUITE
