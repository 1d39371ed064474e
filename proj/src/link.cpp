#include "scma/link.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "scma/parallel.hpp"

namespace scma {

namespace {

int int_log2(int v) {
  int bits = 0;
  while ((1 << bits) < v) ++bits;
  if ((1 << bits) != v) {
    throw std::invalid_argument("modulation order must be a power of two");
  }
  return bits;
}

/// Sum and count of log-scaled terms with a running maximum, so the
/// marginalization in the log domain is an exact logsumexp, not a max
/// approximation.
struct LogAccumulator {
  double peak = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;

  void add(double x) {
    if (x <= peak) {
      scaled += std::exp(x - peak);
    } else {
      scaled = scaled * std::exp(peak - x) + 1.0;
      peak = x;
    }
  }
  double value() const {
    return scaled > 0.0 ? peak + std::log(scaled)
                        : -std::numeric_limits<double>::infinity();
  }
};

}  // namespace

double MpaResult::posterior(int user, int m) const {
  const int order = static_cast<int>(posteriors.size() / decisions.size());
  return posteriors[user * order + m];
}

MpaDecoder::MpaDecoder(const CodebookSet& cs, const MpaConfig& cfg)
    : cs_(&cs), cfg_(cfg) {
  if (cfg.iterations < 1) {
    throw std::invalid_argument("decoder needs at least one iteration");
  }
  if (cfg.damping < 0.0 || cfg.damping >= 1.0) {
    throw std::invalid_argument("damping must lie in [0, 1)");
  }
  validate_codebook_set(cs);

  const int m = cs.modulation_order;
  resources_.resize(cs.resources);
  user_edges_.resize(cs.users);
  for (int j = 0; j < cs.users; ++j) {
    const auto active = cs.codebooks[j].active_resources;
    user_edges_[j] = active;
    for (int k : active) resources_[k].users.push_back(j);
  }
  for (int k = 0; k < cs.resources; ++k) {
    Resource& res = resources_[k];
    const int degree = static_cast<int>(res.users.size());
    std::uint64_t combos = 1;
    for (int t = 0; t < degree; ++t) combos *= m;
    res.points.resize(combos);
    for (std::uint64_t c = 0; c < combos; ++c) {
      cplx sum{0.0, 0.0};
      std::uint64_t rest = c;
      for (int t = degree - 1; t >= 0; --t) {
        const int digit = static_cast<int>(rest % m);
        rest /= m;
        sum += cs.codebooks[res.users[t]].at(k, digit);
      }
      res.points[c] = sum;
    }
  }
}

MpaResult MpaDecoder::decode(std::span<const cplx> y, std::span<const cplx> h,
                             double sigma2) const {
  const int m = cs_->modulation_order;
  const int users = cs_->users;
  const int resources = cs_->resources;
  if (y.size() != static_cast<std::size_t>(resources) ||
      h.size() != static_cast<std::size_t>(resources)) {
    throw std::invalid_argument("one received sample and gain per resource");
  }
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("noise variance must be positive");
  }
  const bool log_domain = cfg_.domain == MpaDomain::Log;

  // Edge bookkeeping: edge = (resource, slot in its user list).
  std::vector<int> edge_base(resources + 1, 0);
  for (int k = 0; k < resources; ++k) {
    edge_base[k + 1] =
        edge_base[k] + static_cast<int>(resources_[k].users.size());
  }
  const int edges = edge_base[resources];
  std::vector<std::array<int, 2>> user_edge(users, {-1, -1});
  for (int k = 0; k < resources; ++k) {
    for (std::size_t t = 0; t < resources_[k].users.size(); ++t) {
      const int j = resources_[k].users[t];
      user_edge[j][user_edges_[j][0] == k ? 0 : 1] =
          edge_base[k] + static_cast<int>(t);
    }
  }

  // Channel factors, rescaled by the best combo per resource so the
  // probability domain cannot underflow to all zeros.
  std::vector<std::vector<double>> cost(resources);
  for (int k = 0; k < resources; ++k) {
    const Resource& res = resources_[k];
    cost[k].resize(res.points.size());
    double least = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < res.points.size(); ++c) {
      cost[k][c] = std::norm(y[k] - h[k] * res.points[c]);
      least = std::min(least, cost[k][c]);
    }
    for (double& v : cost[k]) {
      v = -(v - least) / sigma2;
      if (!log_domain) v = std::exp(v);
    }
  }

  const double flat = log_domain ? -std::log(static_cast<double>(m)) : 1.0 / m;
  std::vector<double> to_user(edges * m, flat);      // resource -> user
  std::vector<double> from_user(edges * m,
                                log_domain ? 0.0 : 1.0);  // user -> resource
  std::vector<double> fresh(edges * m);
  std::vector<LogAccumulator> log_acc;
  std::vector<double> prob_acc;
  std::vector<double> prefix, suffix;

  for (int iteration = 0; iteration < cfg_.iterations; ++iteration) {
    for (int k = 0; k < resources; ++k) {
      const Resource& res = resources_[k];
      const int degree = static_cast<int>(res.users.size());
      const int base = edge_base[k];
      if (log_domain) {
        log_acc.assign(degree * m, LogAccumulator{});
      } else {
        prob_acc.assign(degree * m, 0.0);
      }
      prefix.assign(degree + 1, log_domain ? 0.0 : 1.0);
      suffix.assign(degree + 1, log_domain ? 0.0 : 1.0);

      std::vector<int> digits(degree, 0);
      for (std::size_t c = 0; c < res.points.size(); ++c) {
        if (c != 0) {  // odometer over the user slots, last slot fastest
          for (int t = degree - 1; t >= 0; --t) {
            if (++digits[t] < m) break;
            digits[t] = 0;
          }
        }
        // exclude-one combination via prefix/suffix over the slot messages
        for (int t = 0; t < degree; ++t) {
          const double v = from_user[(base + t) * m + digits[t]];
          prefix[t + 1] = log_domain ? prefix[t] + v : prefix[t] * v;
        }
        suffix[degree] = log_domain ? 0.0 : 1.0;
        for (int t = degree - 1; t >= 0; --t) {
          const double v = from_user[(base + t) * m + digits[t]];
          suffix[t] = log_domain ? suffix[t + 1] + v : suffix[t + 1] * v;
        }
        for (int t = 0; t < degree; ++t) {
          if (log_domain) {
            log_acc[t * m + digits[t]].add(cost[k][c] + prefix[t] +
                                           suffix[t + 1]);
          } else {
            prob_acc[t * m + digits[t]] += cost[k][c] * prefix[t] *
                                           suffix[t + 1];
          }
        }
      }

      for (int t = 0; t < degree; ++t) {
        double* out = &fresh[(base + t) * m];
        if (log_domain) {
          LogAccumulator norm;
          for (int digit = 0; digit < m; ++digit) {
            out[digit] = log_acc[t * m + digit].value();
            norm.add(out[digit]);
          }
          const double total = norm.value();
          for (int digit = 0; digit < m; ++digit) out[digit] -= total;
        } else {
          double total = 0.0;
          for (int digit = 0; digit < m; ++digit) {
            out[digit] = prob_acc[t * m + digit];
            total += out[digit];
          }
          if (total > 0.0) {
            for (int digit = 0; digit < m; ++digit) out[digit] /= total;
          } else {
            for (int digit = 0; digit < m; ++digit) out[digit] = 1.0 / m;
          }
        }
      }
    }

    if (cfg_.damping > 0.0 && iteration > 0) {
      for (int e = 0; e < edges * m; ++e) {
        to_user[e] =
            cfg_.damping * to_user[e] + (1.0 - cfg_.damping) * fresh[e];
      }
    } else {
      to_user = fresh;
    }

    // Each user spreads over exactly two resources, so the extrinsic
    // message toward one of them is just the message arriving from the
    // other.
    for (int j = 0; j < users; ++j) {
      for (int side = 0; side < 2; ++side) {
        const int target = user_edge[j][side];
        const int other = user_edge[j][1 - side];
        std::copy_n(&to_user[other * m], m, &from_user[target * m]);
      }
    }
  }

  MpaResult result;
  result.posteriors.resize(users * m);
  result.decisions.resize(users);
  for (int j = 0; j < users; ++j) {
    double* post = &result.posteriors[j * m];
    const int e0 = user_edge[j][0];
    const int e1 = user_edge[j][1];
    double total = 0.0;
    for (int digit = 0; digit < m; ++digit) {
      const double a = to_user[e0 * m + digit];
      const double b = to_user[e1 * m + digit];
      post[digit] = log_domain ? std::exp(a + b) : a * b;
      total += post[digit];
    }
    int pick = 0;
    for (int digit = 0; digit < m; ++digit) {
      if (total > 0.0) {
        post[digit] /= total;
      } else {
        post[digit] = 1.0 / m;
      }
      if (post[digit] > post[pick]) pick = digit;
    }
    result.decisions[j] = pick;
  }
  return result;
}

MlDecoder::MlDecoder(const CodebookSet& cs, std::uint64_t cap)
    : users_(cs.users),
      resources_(cs.resources),
      modulation_order_(cs.modulation_order) {
  SuperimposedEnumerator walker(cs, cap);
  points_.reserve(walker.count() * cs.resources);
  do {
    points_.insert(points_.end(), walker.vector().begin(),
                   walker.vector().end());
  } while (walker.next());
}

std::vector<int> MlDecoder::decode(std::span<const cplx> y,
                                   std::span<const cplx> h) const {
  if (y.size() != static_cast<std::size_t>(resources_) ||
      h.size() != static_cast<std::size_t>(resources_)) {
    throw std::invalid_argument("one received sample and gain per resource");
  }
  const std::uint64_t n = points_.size() / resources_;
  std::uint64_t best_rank = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t rank = 0; rank < n; ++rank) {
    const cplx* x = &points_[rank * resources_];
    double metric = 0.0;
    for (int k = 0; k < resources_; ++k) metric += std::norm(y[k] - h[k] * x[k]);
    if (metric < best) {  // strict: ties keep the lexicographically first
      best = metric;
      best_rank = rank;
    }
  }
  std::vector<int> tuple(users_);
  for (int j = users_ - 1; j >= 0; --j) {
    tuple[j] = static_cast<int>(best_rank % modulation_order_);
    best_rank /= modulation_order_;
  }
  return tuple;
}

std::vector<cplx> transmit(const CodebookSet& cs, std::span<const int> indices,
                           std::span<const cplx> h) {
  auto x = superimpose(cs, indices);
  for (int k = 0; k < cs.resources; ++k) x[k] *= h[k];
  return x;
}

// Gray labeling assigns column m the pattern m ^ (m >> 1), so neighbouring
// columns of the mother constellation always differ in exactly one bit.
int bits_to_symbol(std::span<const int> bits, BitMapping mapping) {
  int value = 0;
  for (int b : bits) value = (value << 1) | (b & 1);
  if (mapping == BitMapping::Gray) {
    for (int shift = 1; shift < static_cast<int>(bits.size()); shift <<= 1) {
      value ^= value >> shift;
    }
  }
  return value;
}

void symbol_to_bits(int symbol, int bits_per_symbol, BitMapping mapping,
                    std::span<int> out) {
  int value = symbol;
  if (mapping == BitMapping::Gray) value ^= value >> 1;
  for (int b = 0; b < bits_per_symbol; ++b) {
    out[b] = (value >> (bits_per_symbol - 1 - b)) & 1;
  }
}

double noise_variance(double ebn0_db, int modulation_order) {
  const int bits = int_log2(modulation_order);
  // unit average codeword energy: Eb = 1/log2(M); sigma^2 = N0 per complex
  // dimension
  return 1.0 / (bits * std::pow(10.0, ebn0_db / 10.0));
}

namespace {

/// Symbol index -> bit-pattern integer, inverse of bits_to_symbol.
int symbol_to_pattern(int symbol, int /*bits_per_symbol*/, BitMapping mapping) {
  int value = symbol;
  if (mapping == BitMapping::Gray) value ^= value >> 1;
  return value;
}

/// Bit-pattern integer -> symbol index.
int pattern_to_symbol(int pattern, int bits_per_symbol, BitMapping mapping) {
  int value = pattern;
  if (mapping == BitMapping::Gray) {
    for (int shift = 1; shift < bits_per_symbol; shift <<= 1) {
      value ^= value >> shift;
    }
  }
  return value;
}

constexpr std::uint64_t kSweepStream = 0x6265722d7377ULL;

}  // namespace

BerCurve ber_sweep(const CodebookSet& cs, const SweepConfig& cfg) {
  if (cfg.ebn0_db.empty()) {
    throw std::invalid_argument("sweep needs at least one Eb/N0 point");
  }
  if (cfg.min_errors == 0 && cfg.min_errors_per_user == 0) {
    throw std::invalid_argument("sweep needs a stop target");
  }
  const int users = cs.users;
  const int resources = cs.resources;
  const int m = cs.modulation_order;
  const int bits_per_symbol = int_log2(m);

  const MpaDecoder mpa(cs, cfg.mpa);
  std::optional<MlDecoder> ml;
  if (cfg.decoder == DecoderKind::Ml) ml.emplace(cs);

  constexpr std::uint64_t kBatch = 1024;
  const std::uint64_t trial_cap =
      std::max<std::uint64_t>(1, cfg.max_bits / bits_per_symbol);

  BerCurve curve;
  curve.config = cfg;
  for (std::size_t point = 0; point < cfg.ebn0_db.size(); ++point) {
    const double sigma2 = noise_variance(cfg.ebn0_db[point], m);
    std::vector<std::uint64_t> user_errors(users, 0);
    std::uint64_t trials = 0;
    std::mutex merge_mutex;

    while (trials < trial_cap) {
      const std::uint64_t batch = std::min(kBatch, trial_cap - trials);
      parallel_chunks(batch, cfg.threads, [&](int, std::uint64_t begin,
                                              std::uint64_t end) {
        std::vector<std::uint64_t> local(users, 0);
        std::vector<int> symbols(users), patterns(users);
        std::vector<cplx> h(resources), y(resources);
        for (std::uint64_t offset = begin; offset < end; ++offset) {
          const std::uint64_t trial = trials + offset;
          auto gen = derive_stream(cfg.seed, kSweepStream,
                                   static_cast<std::uint64_t>(point), trial);
          for (int j = 0; j < users; ++j) {
            patterns[j] = static_cast<int>(
                uniform_below(gen, static_cast<std::uint64_t>(m)));
            symbols[j] =
                pattern_to_symbol(patterns[j], bits_per_symbol, cfg.mapping);
          }
          if (cfg.channel == ChannelKind::Rayleigh) {
            for (int k = 0; k < resources; ++k) {
              h[k] = cplx{standard_normal(gen), standard_normal(gen)} *
                     std::numbers::sqrt2 / 2.0;
            }
          } else {
            std::fill(h.begin(), h.end(), cplx{1.0, 0.0});
          }
          y = transmit(cs, symbols, h);
          const double noise_std = std::sqrt(sigma2 / 2.0);
          for (int k = 0; k < resources; ++k) {
            y[k] += cplx{standard_normal(gen), standard_normal(gen)} *
                    noise_std;
          }

          std::vector<int> decided;
          if (cfg.decoder == DecoderKind::Mpa) {
            decided = mpa.decode(y, h, sigma2).decisions;
          } else {
            decided = ml->decode(y, h);
          }
          for (int j = 0; j < users; ++j) {
            const int got =
                symbol_to_pattern(decided[j], bits_per_symbol, cfg.mapping);
            local[j] += std::popcount(
                static_cast<unsigned>(got ^ patterns[j]));
          }
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        for (int j = 0; j < users; ++j) user_errors[j] += local[j];
      });
      trials += batch;

      std::uint64_t total = 0;
      std::uint64_t slowest = std::numeric_limits<std::uint64_t>::max();
      for (int j = 0; j < users; ++j) {
        total += user_errors[j];
        slowest = std::min(slowest, user_errors[j]);
      }
      const bool aggregate_done =
          cfg.min_errors == 0 || total >= cfg.min_errors;
      const bool per_user_done = cfg.min_errors_per_user == 0 ||
                                 slowest >= cfg.min_errors_per_user;
      if (aggregate_done && per_user_done) break;
    }

    BerPoint bp;
    bp.ebn0_db = cfg.ebn0_db[point];
    bp.bits = trials * bits_per_symbol;
    bp.user_errors = user_errors;
    bp.user_ber.resize(users);
    for (int j = 0; j < users; ++j) {
      bp.errors += user_errors[j];
      bp.user_ber[j] = static_cast<double>(user_errors[j]) / bp.bits;
    }
    bp.ber = static_cast<double>(bp.errors) / (bp.bits * users);
    curve.points.push_back(std::move(bp));
  }
  return curve;
}

void save_ber_csv(const BerCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write BER file " + path.string());
  }
  out << "ebn0_db,bits,errors,ber";
  if (!curve.points.empty()) {
    for (std::size_t j = 0; j < curve.points.front().user_ber.size(); ++j) {
      out << ",user" << j + 1 << "_ber";
    }
  }
  out << '\n';
  out.precision(10);
  for (const BerPoint& p : curve.points) {
    out << p.ebn0_db << ',' << p.bits << ',' << p.errors << ',' << p.ber;
    for (double b : p.user_ber) out << ',' << b;
    out << '\n';
  }
}

void save_ber_json(const BerCurve& curve, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  const SweepConfig& cfg = curve.config;
  doc["config"] = {
      {"ebn0_db", cfg.ebn0_db},
      {"channel", cfg.channel == ChannelKind::Awgn ? "awgn" : "rayleigh"},
      {"decoder", cfg.decoder == DecoderKind::Mpa ? "mpa" : "ml"},
      {"mapping", cfg.mapping == BitMapping::Gray ? "gray" : "natural"},
      {"mpa",
       {{"iterations", cfg.mpa.iterations},
        {"damping", cfg.mpa.damping},
        {"domain",
         cfg.mpa.domain == MpaDomain::Log ? "log" : "probability"}}},
      {"min_errors", cfg.min_errors},
      {"min_errors_per_user", cfg.min_errors_per_user},
      {"max_bits", cfg.max_bits},
      {"seed", cfg.seed},
  };
  doc["points"] = nlohmann::ordered_json::array();
  for (const BerPoint& p : curve.points) {
    doc["points"].push_back({{"ebn0_db", p.ebn0_db},
                             {"bits", p.bits},
                             {"errors", p.errors},
                             {"ber", p.ber},
                             {"user_errors", p.user_errors},
                             {"user_ber", p.user_ber}});
  }
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write BER file " + path.string());
  }
  out << doc.dump(2) << '\n';
}

}  // namespace scma
