#include "scma/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "scma/parallel.hpp"
#include "scma/rng.hpp"

namespace scma {

namespace {

// --- exact MED, difference formulation -----------------------------------
//
// The squared distance between two superimposed points is the squared norm
// of sum_j (codeword_j(p_j) - codeword_j(q_j)), so the search runs over one
// difference per user instead of over point pairs. Three reductions keep it
// tractable:
//   * per user, only the distinct nonzero differences matter (a handful for
//     structured codebooks: the M=4 antipodal sets have 12 plus zero);
//   * negating every difference gives the same norm, so the first user that
//     differs is restricted to one representative of each +/- pair;
//   * users are ordered so resources finish early; once every remaining
//     user is inactive on a resource its partial sum is final, and the
//     accumulated final energy prunes the branch against the current best.

struct Delta {
  cplx a, b;  // contribution on the user's first / second active resource
  int p, q;   // codeword pair realizing it
};

struct UserDiffs {
  int user = 0;
  std::array<int, 2> rows{};
  std::vector<Delta> full;  // all distinct nonzero differences
  std::vector<Delta> half;  // one of each +/- pair
  double min_norm2 = std::numeric_limits<double>::infinity();
};

bool canonical_sign(const Delta& d) {
  for (double v : {d.a.real(), d.a.imag(), d.b.real(), d.b.imag()}) {
    if (v > 0.0) return true;
    if (v < 0.0) return false;
  }
  return false;
}

UserDiffs user_differences(const Codebook& cb) {
  UserDiffs ud;
  ud.user = cb.user_index;
  ud.rows = cb.active_resources;
  std::map<std::array<double, 4>, Delta> distinct;
  const int m = cb.modulation_order;
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      if (p == q) continue;
      Delta d;
      d.a = cb.at(ud.rows[0], p) - cb.at(ud.rows[0], q);
      d.b = cb.at(ud.rows[1], p) - cb.at(ud.rows[1], q);
      d.p = p;
      d.q = q;
      if (d.a == cplx{0.0, 0.0} && d.b == cplx{0.0, 0.0}) continue;
      distinct.try_emplace(
          {d.a.real(), d.a.imag(), d.b.real(), d.b.imag()}, d);
    }
  }
  for (auto& [key, d] : distinct) {
    ud.full.push_back(d);
    if (canonical_sign(d)) ud.half.push_back(d);
    ud.min_norm2 = std::min(ud.min_norm2, std::norm(d.a) + std::norm(d.b));
  }
  const auto by_norm = [](const Delta& x, const Delta& y) {
    return std::norm(x.a) + std::norm(x.b) < std::norm(y.a) + std::norm(y.b);
  };
  std::sort(ud.full.begin(), ud.full.end(), by_norm);
  std::sort(ud.half.begin(), ud.half.end(), by_norm);
  return ud;
}

/// Place users so that resources are completed as early as possible: always
/// take the user whose active resources already carry the most placed users.
std::vector<int> placement_order(const CodebookSet& cs) {
  std::vector<int> order;
  std::vector<bool> placed(cs.users, false);
  std::vector<int> filled(cs.resources, 0);
  for (int step = 0; step < cs.users; ++step) {
    int pick = -1, pick_score = -1;
    for (int j = 0; j < cs.users; ++j) {
      if (placed[j]) continue;
      int score = 0;
      for (int k : cs.codebooks[j].active_resources) score += filled[k];
      if (score > pick_score) {
        pick = j;
        pick_score = score;
      }
    }
    placed[pick] = true;
    for (int k : cs.codebooks[pick].active_resources) ++filled[k];
    order.push_back(pick);
  }
  return order;
}

struct SearchShared {
  std::atomic<double> best_sq;
  std::mutex collision_mutex;
  bool degenerate = false;
  std::array<std::vector<int>, 2> colliding;
  std::atomic<std::uint64_t> leaves{0};

  void offer(double candidate_sq, const std::vector<int>& sel_p,
             const std::vector<int>& sel_q) {
    double current = best_sq.load(std::memory_order_relaxed);
    while (candidate_sq < current &&
           !best_sq.compare_exchange_weak(current, candidate_sq,
                                          std::memory_order_relaxed)) {
    }
    if (candidate_sq == 0.0) {
      std::lock_guard<std::mutex> lock(collision_mutex);
      if (!degenerate) {
        degenerate = true;
        colliding = {sel_p, sel_q};
      }
    }
  }
};

struct SearchWorker {
  const std::vector<UserDiffs>* diffs;  // in placement order
  const std::vector<std::vector<int>>* newly_locked;  // resources per level
  SearchShared* shared;
  std::vector<cplx> sum;
  std::vector<int> sel_p, sel_q;
  std::uint64_t leaves = 0;

  void dfs(std::size_t level, bool any, double locked2) {
    if (locked2 >= shared->best_sq.load(std::memory_order_relaxed)) return;
    if (level == diffs->size()) {
      if (any) {
        ++leaves;
        shared->offer(locked2, sel_p, sel_q);
      }
      return;
    }
    const UserDiffs& ud = (*diffs)[level];

    const auto descend = [&](bool now_any) {
      double next_locked = locked2;
      for (int k : (*newly_locked)[level]) next_locked += std::norm(sum[k]);
      dfs(level + 1, now_any, next_locked);
    };

    // the user repeats its codeword
    sel_p[ud.user] = 0;
    sel_q[ud.user] = 0;
    descend(any);

    for (const Delta& d : any ? ud.full : ud.half) {
      sum[ud.rows[0]] += d.a;
      sum[ud.rows[1]] += d.b;
      sel_p[ud.user] = d.p;
      sel_q[ud.user] = d.q;
      descend(true);
      sum[ud.rows[0]] -= d.a;
      sum[ud.rows[1]] -= d.b;
    }
  }
};

MedEstimate med_exact_difference(const CodebookSet& cs,
                                 const MedOptions& opts) {
  const std::vector<int> order = placement_order(cs);
  std::vector<UserDiffs> diffs;
  diffs.reserve(order.size());
  for (int j : order) diffs.push_back(user_differences(cs.codebooks[j]));

  // Resources whose final user sits at each level of the order.
  std::vector<int> last_level(cs.resources, -1);
  for (std::size_t level = 0; level < diffs.size(); ++level) {
    for (int k : diffs[level].rows) {
      last_level[k] = static_cast<int>(level);
    }
  }
  std::vector<std::vector<int>> newly_locked(diffs.size());
  for (int k = 0; k < cs.resources; ++k) {
    newly_locked[last_level[k]].push_back(k);
  }

  SearchShared shared;
  double primer = std::numeric_limits<double>::infinity();
  for (const UserDiffs& ud : diffs) primer = std::min(primer, ud.min_norm2);
  shared.best_sq.store(primer);

  // Top level: option 0 is "first user repeats", the rest walk its half set.
  const UserDiffs& first = diffs[0];
  const std::uint64_t options = 1 + first.half.size();
  parallel_chunks(options, opts.threads,
                  [&](int, std::uint64_t begin, std::uint64_t end) {
                    SearchWorker w;
                    w.diffs = &diffs;
                    w.newly_locked = &newly_locked;
                    w.shared = &shared;
                    w.sum.assign(cs.resources, cplx{0.0, 0.0});
                    w.sel_p.assign(cs.users, 0);
                    w.sel_q.assign(cs.users, 0);
                    for (std::uint64_t opt = begin; opt < end; ++opt) {
                      // Fresh accumulator per option: the +=/-= walk does
                      // not restore sums exactly, and leaking those last-bit
                      // residues into the next option would make the result
                      // depend on how options are split across workers.
                      w.sum.assign(cs.resources, cplx{0.0, 0.0});
                      if (opt == 0) {
                        w.sel_p[first.user] = 0;
                        w.sel_q[first.user] = 0;
                        w.dfs(1, false, 0.0);
                      } else {
                        const Delta& d = first.half[opt - 1];
                        w.sum[first.rows[0]] += d.a;
                        w.sum[first.rows[1]] += d.b;
                        w.sel_p[first.user] = d.p;
                        w.sel_q[first.user] = d.q;
                        double locked2 = 0.0;
                        for (int k : newly_locked[0])
                          locked2 += std::norm(w.sum[k]);
                        w.dfs(1, true, locked2);
                      }
                    }
                    shared.leaves.fetch_add(w.leaves);
                  });

  MedEstimate est;
  est.method = "exact";
  est.value = std::sqrt(shared.best_sq.load());
  est.pairs_examined = shared.leaves.load();
  est.degenerate = shared.degenerate;
  if (shared.degenerate) {
    est.value = 0.0;
    est.colliding_pair = shared.colliding;
  }
  return est;
}

// --- exact MED, literal pair scan ----------------------------------------

void decode_tuple(std::uint64_t rank, int modulation_order, int users,
                  std::vector<int>& out) {
  out.assign(users, 0);
  for (int j = users - 1; j >= 0; --j) {
    out[j] = static_cast<int>(rank % modulation_order);
    rank /= modulation_order;
  }
}

MedEstimate med_exact_pairs(const CodebookSet& cs, const MedOptions& opts) {
  SuperimposedEnumerator walker(cs, opts.max_points);
  const std::uint64_t n = walker.count();
  const int resources = cs.resources;
  std::vector<cplx> points;
  points.reserve(n * resources);
  do {
    points.insert(points.end(), walker.vector().begin(),
                  walker.vector().end());
  } while (walker.next());

  std::atomic<double> best_sq{std::numeric_limits<double>::infinity()};
  std::mutex collision_mutex;
  bool degenerate = false;
  std::array<std::uint64_t, 2> colliding{0, 0};

  parallel_chunks(n, opts.threads, [&](int, std::uint64_t begin,
                                       std::uint64_t end) {
    double local = best_sq.load(std::memory_order_relaxed);
    for (std::uint64_t p = begin; p < end; ++p) {
      const cplx* xp = &points[p * resources];
      for (std::uint64_t q = p + 1; q < n; ++q) {
        const cplx* xq = &points[q * resources];
        double d2 = 0.0;
        for (int k = 0; k < resources; ++k) d2 += std::norm(xp[k] - xq[k]);
        if (d2 < local) {
          local = d2;
          double current = best_sq.load(std::memory_order_relaxed);
          while (d2 < current && !best_sq.compare_exchange_weak(
                                     current, d2, std::memory_order_relaxed)) {
          }
          if (d2 == 0.0) {
            std::lock_guard<std::mutex> lock(collision_mutex);
            if (!degenerate) {
              degenerate = true;
              colliding = {p, q};
            }
          }
        }
      }
      local = best_sq.load(std::memory_order_relaxed);
    }
  });

  MedEstimate est;
  est.method = "exact";
  est.value = std::sqrt(best_sq.load());
  est.pairs_examined = n * (n - 1) / 2;
  est.degenerate = degenerate;
  if (degenerate) {
    est.value = 0.0;
    est.colliding_pair.emplace();
    decode_tuple(colliding[0], cs.modulation_order, cs.users,
                 (*est.colliding_pair)[0]);
    decode_tuple(colliding[1], cs.modulation_order, cs.users,
                 (*est.colliding_pair)[1]);
  }
  return est;
}

}  // namespace

MedEstimate med_exact(const CodebookSet& cs, const MedOptions& opts) {
  require_enumeration_budget(cs, opts.max_points);
  switch (opts.algorithm) {
    case MedAlgorithm::PairSweep:
      return med_exact_pairs(cs, opts);
    case MedAlgorithm::Auto:
    case MedAlgorithm::DifferenceSweep:
      break;
  }
  return med_exact_difference(cs, opts);
}

MedEstimate med_monte_carlo(const CodebookSet& cs, int samples_per_batch,
                            int batches, std::uint64_t seed, int threads) {
  if (samples_per_batch < 2 || batches < 1) {
    throw std::invalid_argument(
        "Monte Carlo MED needs at least 2 samples and 1 batch");
  }
  const std::uint64_t q = samples_per_batch;
  constexpr std::uint64_t kMedStream = 0x6d65642d6d63ULL;  // draw context tag

  double best_sq = std::numeric_limits<double>::infinity();
  bool degenerate = false;
  std::array<std::vector<int>, 2> colliding;
  std::uint64_t pairs = 0;

  std::vector<std::vector<int>> tuples(q, std::vector<int>(cs.users));
  std::vector<cplx> points(q * cs.resources);
  for (int b = 0; b < batches; ++b) {
    auto gen = derive_stream(seed, kMedStream, static_cast<std::uint64_t>(b));
    for (std::uint64_t s = 0; s < q; ++s) {
      for (int j = 0; j < cs.users; ++j) {
        tuples[s][j] = static_cast<int>(
            uniform_below(gen, static_cast<std::uint64_t>(cs.modulation_order)));
      }
      const auto x = superimpose(cs, tuples[s]);
      std::copy(x.begin(), x.end(), points.begin() + s * cs.resources);
    }

    std::atomic<double> batch_best{std::numeric_limits<double>::infinity()};
    std::mutex collision_mutex;
    parallel_chunks(q, threads, [&](int, std::uint64_t begin,
                                    std::uint64_t end) {
      double local = batch_best.load(std::memory_order_relaxed);
      for (std::uint64_t p = begin; p < end; ++p) {
        const cplx* xp = &points[p * cs.resources];
        for (std::uint64_t r = p + 1; r < q; ++r) {
          if (tuples[p] == tuples[r]) continue;  // the same point twice
          const cplx* xr = &points[r * cs.resources];
          double d2 = 0.0;
          for (int k = 0; k < cs.resources; ++k) d2 += std::norm(xp[k] - xr[k]);
          if (d2 < local) {
            local = d2;
            double current = batch_best.load(std::memory_order_relaxed);
            while (d2 < current &&
                   !batch_best.compare_exchange_weak(
                       current, d2, std::memory_order_relaxed)) {
            }
            if (d2 == 0.0) {
              std::lock_guard<std::mutex> lock(collision_mutex);
              if (!degenerate) {
                degenerate = true;
                colliding = {tuples[p], tuples[r]};
              }
            }
          }
        }
        local = batch_best.load(std::memory_order_relaxed);
      }
    });
    best_sq = std::min(best_sq, batch_best.load());
    pairs += q * (q - 1) / 2;
  }

  MedEstimate est;
  est.method = "monte_carlo";
  est.value = degenerate ? 0.0 : std::sqrt(best_sq);
  est.pairs_examined = pairs;
  est.samples_per_batch = samples_per_batch;
  est.batches = batches;
  est.seed = seed;
  est.degenerate = degenerate;
  if (degenerate) est.colliding_pair = colliding;
  return est;
}

CodebookMpd codebook_mpd(const Codebook& cb) {
  if (cb.modulation_order < 2) {
    throw std::invalid_argument(
        "product distance needs at least two codewords");
  }
  CodebookMpd result;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p < cb.modulation_order; ++p) {
    for (int q = p + 1; q < cb.modulation_order; ++q) {
      double prod = 1.0;
      bool differs = false;
      for (int k = 0; k < cb.resources; ++k) {
        const double d = std::abs(cb.at(k, p) - cb.at(k, q));
        if (d > 0.0) {
          prod *= d;
          differs = true;
        }
      }
      if (!differs) {
        result.degenerate = true;
        result.value = 0.0;
        return result;
      }
      best = std::min(best, prod);
    }
  }
  result.value = best;
  return result;
}

MpdReport mpd_report(const CodebookSet& cs) {
  MpdReport report;
  report.system = std::numeric_limits<double>::infinity();
  for (const Codebook& cb : cs.codebooks) {
    const CodebookMpd one = codebook_mpd(cb);
    report.per_user.push_back(one.value);
    report.degenerate = report.degenerate || one.degenerate;
    report.system = std::min(report.system, one.value);
  }
  if (cs.template_name && cs.design_point) {
    report.closed_form = gamma_mpd_closed_form(
        builtin_template(*cs.template_name), cs.design_point->energies,
        cs.modulation_order, cs.design_point->omega);
  }
  return report;
}

double gamma_mpd_closed_form(const SignatureTemplate& t,
                             const std::vector<double>& energies,
                             int modulation_order, double omega) {
  if (energies.size() != static_cast<std::size_t>(t.superposed)) {
    throw std::invalid_argument("expected one energy per superposed index");
  }
  // Per user the product distance scales by sqrt(E_i E_j) / E for its two
  // weight indices; the worst user sets the system value.
  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < t.users; ++j) {
    const auto rows = t.active_resources(j);
    const double e1 = energies[t.at(rows[0], j) - 1];
    const double e2 = energies[t.at(rows[1], j) - 1];
    worst = std::min(worst, std::sqrt(e1 * e2));
  }
  return worst / dimension_energy(modulation_order, omega) *
         mc_mpd_closed_form(modulation_order, omega);
}

}  // namespace scma
