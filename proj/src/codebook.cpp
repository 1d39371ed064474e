#include "scma/codebook.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace scma {

std::vector<cplx> Codebook::codeword(int m) const {
  std::vector<cplx> col(resources);
  for (int k = 0; k < resources; ++k) col[k] = at(k, m);
  return col;
}

void validate_codebook_set(const CodebookSet& cs) {
  if (cs.modulation_order < 2 || cs.users < 1 || cs.resources < 1) {
    throw ValidationError("dimensions must be positive (M >= 2)");
  }
  if (cs.nonzero_dims != 2) {
    throw ValidationError("each codebook must spread over exactly 2 resources");
  }
  if (cs.codebooks.size() != static_cast<std::size_t>(cs.users)) {
    throw ValidationError("expected " + std::to_string(cs.users) +
                          " codebooks, found " +
                          std::to_string(cs.codebooks.size()));
  }

  const SignatureTemplate* tmpl = nullptr;
  SignatureTemplate tmpl_storage;
  if (cs.template_name) {
    tmpl_storage = builtin_template(*cs.template_name);
    tmpl = &tmpl_storage;
    if (tmpl->users != cs.users || tmpl->resources != cs.resources) {
      throw ValidationError("template " + *cs.template_name + " is " +
                            std::to_string(tmpl->resources) + "x" +
                            std::to_string(tmpl->users) +
                            ", set dimensions disagree");
    }
  }

  double total = 0.0;
  for (int j = 0; j < cs.users; ++j) {
    const Codebook& cb = cs.codebooks[j];
    if (cb.user_index != j || cb.resources != cs.resources ||
        cb.modulation_order != cs.modulation_order ||
        cb.entries.size() !=
            static_cast<std::size_t>(cs.resources * cs.modulation_order)) {
      throw ValidationError("codebook " + std::to_string(j + 1) +
                            " has inconsistent dimensions");
    }
    if (cb.active_resources[0] >= cb.active_resources[1]) {
      throw ValidationError("codebook " + std::to_string(j + 1) +
                            " must declare its active resources in "
                            "ascending order");
    }
    int nonzero_rows = 0;
    for (int k = 0; k < cs.resources; ++k) {
      bool any = false;
      for (int m = 0; m < cs.modulation_order; ++m) {
        const cplx v = cb.at(k, m);
        total += std::norm(v);
        if (v != cplx{0.0, 0.0}) any = true;
      }
      const bool expected_active =
          k == cb.active_resources[0] || k == cb.active_resources[1];
      if (any != expected_active) {
        throw ValidationError("codebook " + std::to_string(j + 1) + " row " +
                              std::to_string(k + 1) +
                              " disagrees with its declared active resources");
      }
      if (any) ++nonzero_rows;
      if (tmpl && any != (tmpl->at(k, j) != 0)) {
        throw ValidationError("codebook " + std::to_string(j + 1) + " row " +
                              std::to_string(k + 1) +
                              " disagrees with template " + tmpl->name);
      }
    }
    if (nonzero_rows != 2) {
      throw ValidationError("codebook " + std::to_string(j + 1) + " has " +
                            std::to_string(nonzero_rows) +
                            " nonzero rows, expected 2");
    }
  }

  const double expected = static_cast<double>(cs.modulation_order) * cs.users;
  if (std::abs(total - expected) > 0.02 * expected) {
    std::ostringstream msg;
    msg << "total codebook energy " << total << " deviates from " << expected
        << " by more than 2%";
    throw ValidationError(msg.str());
  }
}

CodebookSet build_codebooks(const SignatureMatrix& sig,
                            const MotherConstellation& mc) {
  const SignatureTemplate& t = sig.tmpl;
  const int m = mc.modulation_order;

  CodebookSet cs;
  cs.modulation_order = m;
  cs.users = t.users;
  cs.resources = t.resources;
  cs.superposed = t.superposed;
  cs.template_name = t.name;
  cs.design_point =
      DesignPoint{sig.weights.energies, sig.weights.phases, mc.omega};
  cs.provenance = Provenance::Generated;
  {
    std::ostringstream detail;
    detail << "star-qam M=" << m << " omega=" << mc.omega << " on " << t.name;
    cs.provenance_detail = detail.str();
  }

  cs.codebooks.resize(t.users);
  for (int j = 0; j < t.users; ++j) {
    std::vector<cplx> column(t.resources);
    for (int k = 0; k < t.resources; ++k) column[k] = sig.at(k, j);
    const auto spread = ezc(column);  // K x 2, diagonal per active row

    Codebook& cb = cs.codebooks[j];
    cb.user_index = j;
    cb.resources = t.resources;
    cb.modulation_order = m;
    cb.active_resources = t.active_resources(j);
    cb.entries.assign(static_cast<std::size_t>(t.resources) * m,
                      cplx{0.0, 0.0});
    for (int k = 0; k < t.resources; ++k) {
      for (int r = 0; r < 2; ++r) {
        const cplx z = spread[k * 2 + r];
        if (z == cplx{0.0, 0.0}) continue;
        for (int col = 0; col < m; ++col) {
          cb.entries[k * m + col] += z * mc.rows[r][col];
        }
      }
    }
  }

  validate_codebook_set(cs);
  return cs;
}

CodebookSet build_codebooks(const SignatureTemplate& t, const DesignPoint& dp,
                            int modulation_order) {
  const MotherConstellation mc = build_mc(modulation_order, dp.omega);
  const double target =
      static_cast<double>(modulation_order) * t.users / t.resources;
  const SignatureMatrix sig =
      build_signature(t, ResourceWeights{dp.energies, dp.phases},
                      dimension_energy(modulation_order, dp.omega), target);
  return build_codebooks(sig, mc);
}

double total_energy(const CodebookSet& cs) {
  double total = 0.0;
  for (const Codebook& cb : cs.codebooks) {
    for (const cplx& v : cb.entries) total += std::norm(v);
  }
  return total;
}

std::vector<cplx> superimpose(const CodebookSet& cs,
                              std::span<const int> indices) {
  if (indices.size() != static_cast<std::size_t>(cs.users)) {
    throw std::invalid_argument("expected one codeword index per user");
  }
  std::vector<cplx> sum(cs.resources, cplx{0.0, 0.0});
  for (int j = 0; j < cs.users; ++j) {
    const int m = indices[j];
    if (m < 0 || m >= cs.modulation_order) {
      throw std::invalid_argument("codeword index out of range for user " +
                                  std::to_string(j + 1));
    }
    const Codebook& cb = cs.codebooks[j];
    for (int k : cb.active_resources) sum[k] += cb.at(k, m);
  }
  return sum;
}

std::optional<std::uint64_t> superimposed_count(const CodebookSet& cs) {
  std::uint64_t count = 1;
  const std::uint64_t m = cs.modulation_order;
  for (int j = 0; j < cs.users; ++j) {
    if (count > (std::uint64_t{1} << 63) / m) return std::nullopt;
    count *= m;
  }
  return count;
}

void require_enumeration_budget(const CodebookSet& cs, std::uint64_t cap) {
  const auto count = superimposed_count(cs);
  if (!count || *count >= cap) {
    std::ostringstream msg;
    msg << "enumerating " << cs.modulation_order << "^" << cs.users
        << " superimposed codewords exceeds the budget of " << cap
        << " points; use the Monte Carlo distance estimator or the "
           "message-passing decoder instead";
    throw BudgetError(msg.str());
  }
}

SuperimposedEnumerator::SuperimposedEnumerator(const CodebookSet& cs,
                                               std::uint64_t cap)
    : cs_(&cs) {
  require_enumeration_budget(cs, cap);
  count_ = *superimposed_count(cs);
  indices_.assign(cs.users, 0);
  sum_ = superimpose(cs, indices_);
}

bool SuperimposedEnumerator::next() {
  const int m = cs_->modulation_order;
  for (int j = cs_->users - 1; j >= 0; --j) {
    const Codebook& cb = cs_->codebooks[j];
    const int old = indices_[j];
    const int next = old + 1 == m ? 0 : old + 1;
    indices_[j] = next;
    for (int k : cb.active_resources) sum_[k] += cb.at(k, next) - cb.at(k, old);
    if (next != 0) return true;  // no carry
  }
  return false;  // wrapped back to the all-zero tuple
}

DesignPoint fit_design_point(const CodebookSet& cs,
                             const SignatureTemplate& t) {
  if (t.users != cs.users || t.resources != cs.resources) {
    throw std::invalid_argument("template dimensions disagree with the set");
  }
  const int m = cs.modulation_order;
  const int unit_col_row1 = m / 2 - 1;  // carries amplitude 1 in MC row 1
  const int unit_col_row2 = m - 1;      // carries amplitude +1 in MC row 2

  std::vector<cplx> z_sum(t.superposed, cplx{0.0, 0.0});
  std::vector<double> e_sum(t.superposed, 0.0);
  std::vector<int> hits(t.superposed, 0);
  double omega_sum = 0.0;
  int omega_hits = 0;

  for (int j = 0; j < t.users; ++j) {
    const Codebook& cb = cs.codebooks[j];
    const auto actives = t.active_resources(j);
    for (int r = 0; r < 2; ++r) {
      const int k = actives[r];
      const int idx = t.at(k, j) - 1;
      if (idx < 0) {
        throw std::invalid_argument("template leaves an active cell unindexed");
      }
      double row_energy = 0.0;
      double peak = 0.0;
      for (int col = 0; col < m; ++col) {
        const double a = std::abs(cb.at(k, col));
        row_energy += a * a;
        peak = std::max(peak, a);
      }
      const cplx unit = cb.at(k, r == 0 ? unit_col_row1 : unit_col_row2);
      z_sum[idx] += unit;
      e_sum[idx] += row_energy;
      ++hits[idx];
      omega_sum += 1.0 + (peak / std::abs(unit) - 1.0) / (m / 2 - 1);
      ++omega_hits;
    }
  }

  DesignPoint dp;
  dp.energies.resize(t.superposed);
  dp.phases.resize(t.superposed);
  for (int i = 0; i < t.superposed; ++i) {
    if (hits[i] == 0) {
      throw std::invalid_argument("weight index " + std::to_string(i + 1) +
                                  " never appears in the template");
    }
    dp.energies[i] = e_sum[i] / hits[i];
    dp.phases[i] = std::arg(z_sum[i] / static_cast<double>(hits[i]));
    if (dp.phases[i] < 0.0 && dp.phases[i] > -1e-12) dp.phases[i] = 0.0;
  }
  dp.omega = omega_sum / omega_hits;
  return dp;
}

}  // namespace scma
