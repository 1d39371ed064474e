#include "scma/signature.hpp"

#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scma {

namespace {

SignatureTemplate make_template(std::string name, int resources, int users,
                                int superposed, std::vector<int> placement) {
  SignatureTemplate t;
  t.name = std::move(name);
  t.resources = resources;
  t.users = users;
  t.superposed = superposed;
  t.placement = std::move(placement);
  return t;
}

// Each user occupies two resources; every unordered resource pair appears
// exactly once, which is what pushes the factor-graph girth to 6.
const SignatureTemplate& template_4x6() {
  static const SignatureTemplate t = make_template(
      "S4x6", 4, 6, 3,
      {
          0, 1, 2, 0, 3, 0,  //
          1, 0, 2, 0, 0, 3,  //
          0, 3, 0, 2, 0, 1,  //
          3, 0, 0, 2, 1, 0,  //
      });
  return t;
}

const SignatureTemplate& template_5x10() {
  static const SignatureTemplate t = make_template(
      "S5x10", 5, 10, 4,
      {
          1, 2, 3, 4, 0, 0, 0, 0, 0, 0,  //
          4, 0, 0, 0, 1, 2, 3, 0, 0, 0,  //
          0, 3, 0, 0, 4, 0, 0, 1, 2, 0,  //
          0, 0, 2, 0, 0, 3, 0, 4, 0, 1,  //
          0, 0, 0, 1, 0, 0, 2, 0, 3, 4,  //
      });
  return t;
}

}  // namespace

std::array<int, 2> SignatureTemplate::active_resources(int user) const {
  std::array<int, 2> rows{-1, -1};
  int found = 0;
  for (int k = 0; k < resources; ++k) {
    if (at(k, user) != 0) {
      if (found < 2) rows[found] = k;
      ++found;
    }
  }
  if (found != 2) {
    throw ValidationError("user " + std::to_string(user + 1) + " occupies " +
                          std::to_string(found) + " resources, expected 2");
  }
  return rows;
}

SignatureTemplate builtin_template(std::string_view name) {
  if (name == "S4x6") return template_4x6();
  if (name == "S5x10") return template_5x10();
  std::ostringstream msg;
  msg << "unknown signature template '" << name << "' (known:";
  for (const auto& known : builtin_template_names()) msg << ' ' << known;
  msg << ')';
  throw std::invalid_argument(msg.str());
}

std::vector<std::string> builtin_template_names() { return {"S4x6", "S5x10"}; }

std::vector<int> indicator_matrix(const SignatureTemplate& t) {
  std::vector<int> f(t.placement.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = t.placement[i] != 0;
  return f;
}

std::optional<int> girth(const std::vector<int>& indicator, int resources,
                         int users) {
  // Bipartite graph: nodes 0..K-1 are resources, K..K+J-1 are users. For
  // each edge, remove it and BFS for the shortest alternative path between
  // its endpoints; that path plus the edge is the shortest cycle through it.
  const int total = resources + users;
  std::vector<std::vector<int>> adj(total);
  for (int k = 0; k < resources; ++k) {
    for (int j = 0; j < users; ++j) {
      if (indicator[k * users + j]) {
        adj[k].push_back(resources + j);
        adj[resources + j].push_back(k);
      }
    }
  }

  int best = std::numeric_limits<int>::max();
  std::vector<int> dist(total);
  for (int k = 0; k < resources; ++k) {
    for (int junode : adj[k]) {
      if (junode < resources) continue;
      std::fill(dist.begin(), dist.end(), -1);
      dist[k] = 0;
      std::deque<int> queue{k};
      while (!queue.empty()) {
        const int node = queue.front();
        queue.pop_front();
        if (node == junode) break;
        for (int next : adj[node]) {
          if (node == k && next == junode) continue;  // the removed edge
          if (next == k && node == junode) continue;
          if (dist[next] < 0) {
            dist[next] = dist[node] + 1;
            queue.push_back(next);
          }
        }
      }
      if (dist[junode] > 0) best = std::min(best, dist[junode] + 1);
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

SignatureMatrix build_signature(const SignatureTemplate& t,
                                const ResourceWeights& w, double mc_energy,
                                double energy_target_sum) {
  const std::size_t df = static_cast<std::size_t>(t.superposed);
  if (w.energies.size() != df || w.phases.size() != df) {
    throw ValidationError(
        "weight vectors must have one energy and one phase per superposed "
        "index (" +
        std::to_string(df) + "), got " + std::to_string(w.energies.size()) +
        " energies and " + std::to_string(w.phases.size()) + " phases");
  }
  if (!(mc_energy > 0.0)) {
    throw ValidationError("mother constellation row energy must be positive");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < df; ++i) {
    if (!(w.energies[i] > 0.0)) {
      throw ValidationError("energy E" + std::to_string(i + 1) +
                            " must be positive, got " +
                            std::to_string(w.energies[i]));
    }
    sum += w.energies[i];
  }
  if (std::abs(sum - energy_target_sum) > 1e-2 * energy_target_sum) {
    throw ValidationError("energies sum to " + std::to_string(sum) +
                          ", expected " + std::to_string(energy_target_sum));
  }

  SignatureMatrix sig;
  sig.tmpl = t;
  sig.weights = w;
  sig.mc_energy = mc_energy;
  sig.entries.assign(t.placement.size(), cplx{0.0, 0.0});
  std::vector<cplx> z(df);
  for (std::size_t i = 0; i < df; ++i) {
    z[i] = std::polar(std::sqrt(w.energies[i] / mc_energy), w.phases[i]);
  }
  for (std::size_t cell = 0; cell < t.placement.size(); ++cell) {
    if (t.placement[cell] != 0) sig.entries[cell] = z[t.placement[cell] - 1];
  }
  return sig;
}

std::vector<double> energy_matrix(const SignatureTemplate& t,
                                  const std::vector<double>& energies) {
  if (energies.size() != static_cast<std::size_t>(t.superposed)) {
    throw ValidationError("expected " + std::to_string(t.superposed) +
                          " energies, got " + std::to_string(energies.size()));
  }
  std::vector<double> e(t.placement.size(), 0.0);
  for (std::size_t cell = 0; cell < t.placement.size(); ++cell) {
    if (t.placement[cell] != 0) e[cell] = energies[t.placement[cell] - 1];
  }
  return e;
}

bool is_power_imbalanced(const SignatureTemplate& t,
                         const std::vector<double>& energies) {
  const auto e = energy_matrix(t, energies);
  std::vector<double> per_user(t.users, 0.0);
  for (int k = 0; k < t.resources; ++k) {
    for (int j = 0; j < t.users; ++j) per_user[j] += e[k * t.users + j];
  }
  for (int j = 1; j < t.users; ++j) {
    if (std::abs(per_user[j] - per_user[0]) > 1e-9 * per_user[0]) return true;
  }
  return false;
}

std::vector<cplx> ezc(const std::vector<cplx>& column) {
  std::vector<cplx> out(column.size() * 2, cplx{0.0, 0.0});
  int found = 0;
  for (std::size_t k = 0; k < column.size(); ++k) {
    if (column[k] != cplx{0.0, 0.0}) {
      if (found < 2) out[k * 2 + found] = column[k];
      ++found;
    }
  }
  if (found != 2) {
    throw std::invalid_argument("signature column has " +
                                std::to_string(found) +
                                " nonzero entries, expected exactly 2");
  }
  return out;
}

}  // namespace scma
