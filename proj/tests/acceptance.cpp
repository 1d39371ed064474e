// End-to-end acceptance gate. Each numbered check prints exactly one
// PASS/FAIL line with the measured value and its target window; the
// process exits nonzero if any check fails. Check 10 is excluded by
// design and prints a note instead (the competing codebook families it
// would compare against are not published, so absolute-gain comparisons
// cannot be reproduced here).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/link.hpp"
#include "scma/metrics.hpp"
#include "scma/mother_constellation.hpp"
#include "scma/optimizer.hpp"
#include "scma/rng.hpp"
#include "scma/signature.hpp"
#include "scma/types.hpp"

using namespace scma;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<double> omega_grid() {
  std::vector<double> g{1.01};
  for (double w = 1.1; w < 10.0 + 1e-9; w += 0.1) g.push_back(w);
  return g;
}

// Log-linear interpolation of the Eb/N0 (dB) where a user's BER curve
// crosses the given level; negative infinity style sentinel on failure.
bool crossing_db(const std::vector<double>& ebn0,
                 const std::vector<double>& ber, double level, double* out) {
  for (std::size_t i = 0; i + 1 < ebn0.size(); ++i) {
    const double hi = ber[i], lo = ber[i + 1];
    if (hi >= level && level >= lo && hi > 0.0 && lo > 0.0 && hi != lo) {
      const double t =
          (std::log10(hi) - std::log10(level)) /
          (std::log10(hi) - std::log10(lo));
      *out = ebn0[i] + t * (ebn0[i + 1] - ebn0[i]);
      return true;
    }
  }
  return false;
}

}  // namespace

int main() {
  const auto set_a = reference_codebooks("A_4x6_M4");
  const auto set_b = reference_codebooks("B_5x10_M4");
  const auto t4 = builtin_template("S4x6");
  const auto t5 = builtin_template("S5x10");

  // 1. Exact MED of the published 4x6 set, by full pair enumeration and by
  //    the branch-and-bound route; both must land on 1.14 +/- 0.01.
  {
    MedOptions pair_opts;
    pair_opts.algorithm = MedAlgorithm::PairSweep;
    const auto pairs = med_exact(set_a, pair_opts);
    const auto branch = med_exact(set_a);
    const bool window = std::abs(pairs.value - 1.14) <= 0.01;
    const bool agree = std::abs(pairs.value - branch.value) <= 1e-9;
    report(1, window && agree,
           "exact MED(4x6) = " + fmt(pairs.value) +
               " (target 1.14 +/- 0.01; pair scan vs branch-and-bound gap " +
               fmt(std::abs(pairs.value - branch.value)) + ")");
  }

  // 2. System minimum product distance of the same set, and its agreement
  //    with the closed form evaluated at the fitted design point.
  {
    const auto rep = mpd_report(set_a);
    const bool window = std::abs(rep.system - 0.55) <= 0.01;
    const bool closed = rep.closed_form &&
                        std::abs(rep.system - *rep.closed_form) <= 0.01;
    report(2, window && closed,
           "system MPD(4x6) = " + fmt(rep.system) +
               " (target 0.55 +/- 0.01; closed form " +
               (rep.closed_form ? fmt(*rep.closed_form) : "missing") + ")");
  }

  // 3. Recovered per-dimension energies and the power-imbalance property.
  {
    const auto dp = fit_design_point(set_a, t4);
    const double want[3] = {2.59, 1.30, 2.11};
    bool ok = dp.energies.size() == 3;
    double sum = 0.0;
    for (std::size_t i = 0; i < dp.energies.size(); ++i) {
      if (std::abs(dp.energies[i] - want[i]) > 0.01) ok = false;
      sum += dp.energies[i];
    }
    if (std::abs(sum - 6.0) > 0.01) ok = false;
    const bool imbalance =
        is_power_imbalanced(t4, dp.energies) &&
        std::abs(dp.energies[0] + dp.energies[2] - 2.0 * dp.energies[1]) >
            0.1;
    report(3, ok && imbalance,
           "fitted energies (" + fmt(dp.energies[0]) + ", " +
               fmt(dp.energies[1]) + ", " + fmt(dp.energies[2]) +
               "), sum " + fmt(sum) +
               " (targets 2.59/1.30/2.11 +/- 0.01, sum 6 +/- 0.01, "
               "E1+E3 != 2E2)");
  }

  // 4. Exact MED of the 5x10 set plus the sampled estimate's subset bound.
  {
    const auto exact = med_exact(set_b);
    const auto sampled = med_monte_carlo(set_b, 5000, 20, 1);
    const bool window = std::abs(exact.value - 0.71) <= 0.02;
    const bool bound = sampled.value >= exact.value - 1e-12 &&
                       sampled.value <= exact.value + 0.05;
    report(4, window && bound,
           "exact MED(5x10) = " + fmt(exact.value) +
               " (target 0.71 +/- 0.02), sampled = " + fmt(sampled.value) +
               " in [exact, exact + 0.05]");
  }

  // 5. Base-constellation product distance: closed form vs enumeration.
  {
    bool ok = true;
    double worst4 = 0.0;
    for (double w : omega_grid()) {
      const double brute = mc_mpd_brute_force(build_mc(4, w));
      const double closed = mc_mpd_closed_form(4, w);
      const double rel = std::abs(closed - brute) / brute;
      worst4 = std::max(worst4, rel);
      if (rel > 1e-9) ok = false;
    }
    double worst_gap = 0.0;
    int gaps = 0;
    for (int m : {8, 16}) {
      for (double w : omega_grid()) {
        const double brute = mc_mpd_brute_force(build_mc(m, w));
        const double closed = mc_mpd_closed_form(m, w);
        if (brute > closed + 1e-12) ok = false;
        if (closed - brute > 1e-12) {
          ++gaps;
          worst_gap = std::max(worst_gap, closed - brute);
        }
      }
    }
    report(5, ok,
           "closed form exact at M=4 (max rel gap " + fmt(worst4) +
               "); upper bound for M=8,16 (" + std::to_string(gaps) +
               " grid points differ, max gap " + fmt(worst_gap) + ")");
  }

  // 6. Factor-graph girth and total-energy normalization.
  {
    const auto g4 = girth(indicator_matrix(t4), t4.resources, t4.users);
    const auto g5 = girth(indicator_matrix(t5), t5.resources, t5.users);
    const bool girth_ok = g4 && *g4 == 6 && g5 && *g5 == 6;

    auto dp = fit_design_point(set_a, t4);
    dp.energies = project_energies(dp.energies, 6.0);
    const double built4 = total_energy(build_codebooks(t4, dp, 4));
    const DesignPoint dp5{{3.0, 2.0, 2.0, 1.0}, {0.2, 0.9, 1.7, 2.5}, 3.0};
    const double built5 = total_energy(build_codebooks(t5, dp5, 4));
    const bool built_ok =
        std::abs(built4 - 24.0) <= 1e-6 && std::abs(built5 - 40.0) <= 1e-6;

    const double ref4 = total_energy(set_a);
    const double ref5 = total_energy(set_b);
    const bool ref_ok = std::abs(ref4 - 24.0) <= 2e-2 * 24.0 &&
                        std::abs(ref5 - 40.0) <= 2e-2 * 40.0;
    report(6, girth_ok && built_ok && ref_ok,
           "girths " + std::to_string(g4 ? *g4 : -1) + "/" +
               std::to_string(g5 ? *g5 : -1) +
               " (target 6/6); built energies " + fmt(built4) + "/" +
               fmt(built5) + " (MJ +/- 1e-6); reference " + fmt(ref4) + "/" +
               fmt(ref5) + " (MJ +/- 2%)");
  }

  // 7. Genetic search reproduces the published optimum region: best of
  //    three seeds at the published floor, default budget.
  {
    double best = 0.0;
    bool histories_ok = true;
    for (std::uint64_t seed : {1, 2, 3}) {
      GaConfig cfg;
      cfg.kappa = 0.54;
      cfg.seed = seed;
      const auto r = ga_optimize(t4, 4, cfg);
      best = std::max(best, r.best_med);
      if (static_cast<int>(r.history.size()) != cfg.generations) {
        histories_ok = false;
      }
      for (std::size_t i = 1; i < r.history.size(); ++i) {
        if (r.history[i] < r.history[i - 1]) histories_ok = false;
      }
    }
    report(7, best >= 1.10 && best >= 1.01 && histories_ok,
           "best search MED over seeds 1-3 = " + fmt(best) +
               " (floor 1.10; baseline 1.01; histories non-decreasing)");
  }

  // 8. Receiver fidelity: message passing vs maximum likelihood on equal
  //    noise, plus exact noiseless recovery.
  {
    const MpaDecoder mpa(set_a);
    const MlDecoder ml(set_a);
    const std::vector<cplx> h(set_a.resources, cplx{1.0, 0.0});

    bool clean_ok = true;
    {
      auto gen = derive_stream(77, 1);
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> sent(set_a.users);
        for (auto& v : sent) v = static_cast<int>(uniform_below(gen, 4));
        const auto y = transmit(set_a, sent, h);
        if (mpa.decode(y, h, 1e-4).decisions != sent) clean_ok = false;
        if (ml.decode(y, h) != sent) clean_ok = false;
      }
    }

    const double sigma2 = noise_variance(8.0, 4);
    std::uint64_t agree = 0, total = 0;
    for (std::uint64_t trial = 0; trial < 10000; ++trial) {
      auto gen = derive_stream(1, 0x6d706132, trial);
      std::vector<int> sent(set_a.users);
      for (auto& v : sent) v = static_cast<int>(uniform_below(gen, 4));
      auto y = transmit(set_a, sent, h);
      for (auto& v : y) {
        v += cplx{standard_normal(gen), standard_normal(gen)} *
             std::sqrt(sigma2 / 2.0);
      }
      const auto soft = mpa.decode(y, h, sigma2).decisions;
      const auto hard = ml.decode(y, h);
      for (int j = 0; j < set_a.users; ++j) {
        ++total;
        if (soft[j] == hard[j]) ++agree;
      }
    }
    const double rate = static_cast<double>(agree) / total;
    report(8, rate >= 0.99 && clean_ok,
           "MPA/ML user-symbol agreement at 8 dB = " + fmt(100.0 * rate) +
               "% over 10^4 trials (floor 99%); noiseless decoding " +
               (clean_ok ? "error-free" : "FAILED"));
  }

  // 9. Per-user error-rate ordering: the two users sharing the weakest
  //    weight pair stay worst, with a clear horizontal gap at BER 1e-4.
  {
    SweepConfig cfg;
    cfg.ebn0_db = {7.5, 8.5, 9.5, 10.5, 11.5};
    cfg.min_errors = 200;
    cfg.min_errors_per_user = 200;
    cfg.seed = 1;
    cfg.mpa.domain = MpaDomain::Probability;
    const auto curve = ber_sweep(set_a, cfg);
    const auto& top = curve.points.back();

    bool floor_ok = true;
    for (auto e : top.user_errors) {
      if (e < cfg.min_errors_per_user) floor_ok = false;
    }
    const double weak_top = std::min(top.user_ber[2], top.user_ber[3]);
    double strong_top = 0.0;
    for (int j : {0, 1, 4, 5}) strong_top = std::max(strong_top, top.user_ber[j]);
    const bool order_ok = top.user_ber[2] > strong_top &&
                          top.user_ber[3] > strong_top;

    std::vector<double> cross(set_a.users);
    bool cross_ok = true;
    for (int j = 0; j < set_a.users; ++j) {
      std::vector<double> ber;
      for (const auto& p : curve.points) ber.push_back(p.user_ber[j]);
      if (!crossing_db(cfg.ebn0_db, ber, 1e-4, &cross[j])) cross_ok = false;
    }
    double gap = 0.0;
    if (cross_ok) {
      const double weak = std::min(cross[2], cross[3]);
      const double strong =
          std::max(std::max(cross[0], cross[1]), std::max(cross[4], cross[5]));
      gap = weak - strong;
    }
    report(9, floor_ok && order_ok && cross_ok && gap > 0.4,
           "users 3,4 worst at " + fmt(top.ebn0_db) + " dB (min weak BER " +
               fmt(weak_top) + " > max strong BER " + fmt(strong_top) +
               "); crossing gap at BER 1e-4 = " + fmt(gap) +
               " dB (floor 0.4)");
  }

  // 10. Comparisons against the other published systems' codebooks need
  //     constructions that were never printed; excluded by design and
  //     covered instead by the distance/search/link checks above.
  std::printf(
      "criterion 10: SKIP  absolute-gain comparisons vs third-party "
      "codebooks are excluded by design (constructions not published)\n");

  std::printf("%s (%d failure%s)\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
