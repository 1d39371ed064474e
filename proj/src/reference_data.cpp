#include <array>
#include <stdexcept>
#include <string>

#include "scma/codebook.hpp"

namespace scma {

namespace {

// Published power-imbalanced sets, 4-decimal precision. Each codebook row is
// one of these weighted mother-constellation rows; which one sits where
// follows the spreading template, so only the 2 x d_f distinct rows are
// stored. first[i-1] is weight i times MC row 1, second[i-1] times MC row 2.
struct ReferenceRows {
  const char* id;
  const char* template_name;
  int modulation_order;
  std::array<std::array<cplx, 4>, 4> first;
  std::array<std::array<cplx, 4>, 4> second;
};

const ReferenceRows kSetA = {
    "A_4x6_M4",
    "S4x6",
    4,
    {{
        {{{-0.2378, 1.0684}, {-0.0684, 0.3074}, {0.0684, -0.3074}, {0.2378, -1.0684}}},
        {{{0.6744, 0.3794}, {0.1941, 0.1092}, {-0.1941, -0.1092}, {-0.6744, -0.3794}}},
        {{{0.9869, 0.0}, {0.2840, 0.0}, {-0.2840, 0.0}, {-0.9869, 0.0}}},
        {{}},
    }},
    {{
        {{{0.0684, -0.3074}, {-0.2378, 1.0684}, {0.2378, -1.0684}, {-0.0684, 0.3074}}},
        {{{-0.1941, -0.1092}, {0.6744, 0.3794}, {-0.6744, -0.3794}, {0.1941, 0.1092}}},
        {{{-0.2840, 0.0}, {0.9869, 0.0}, {-0.9869, 0.0}, {0.2840, 0.0}}},
        {{}},
    }},
};

const ReferenceRows kSetB = {
    "B_5x10_M4",
    "S5x10",
    4,
    {{
        {{{-0.6927, 0.7932}, {-0.2312, 0.2647}, {0.2312, -0.2647}, {0.6927, -0.7932}}},
        {{{-0.5559, 0.8876}, {-0.1855, 0.2962}, {0.1855, -0.2962}, {0.5559, -0.8876}}},
        {{{0.9104, 0.5110}, {0.3038, 0.1705}, {-0.3038, -0.1705}, {-0.9104, -0.5110}}},
        {{{0.5509, 0.0}, {0.1838, 0.0}, {-0.1838, 0.0}, {-0.5509, 0.0}}},
    }},
    {{
        {{{0.2312, -0.2647}, {-0.6927, 0.7932}, {0.6927, -0.7932}, {-0.2312, 0.2647}}},
        {{{0.1855, -0.2962}, {-0.5559, 0.8876}, {0.5559, -0.8876}, {-0.1855, 0.2962}}},
        {{{-0.3038, -0.1705}, {0.9104, 0.5110}, {-0.9104, -0.5110}, {0.3038, 0.1705}}},
        {{{-0.1838, 0.0}, {0.5509, 0.0}, {-0.5509, 0.0}, {0.1838, 0.0}}},
    }},
};

CodebookSet assemble(const ReferenceRows& ref) {
  const SignatureTemplate t = builtin_template(ref.template_name);
  const int m = ref.modulation_order;

  CodebookSet cs;
  cs.modulation_order = m;
  cs.users = t.users;
  cs.resources = t.resources;
  cs.superposed = t.superposed;
  cs.template_name = t.name;
  cs.provenance = Provenance::Reference;
  cs.provenance_detail = ref.id;

  cs.codebooks.resize(t.users);
  for (int j = 0; j < t.users; ++j) {
    Codebook& cb = cs.codebooks[j];
    cb.user_index = j;
    cb.resources = t.resources;
    cb.modulation_order = m;
    cb.active_resources = t.active_resources(j);
    cb.entries.assign(static_cast<std::size_t>(t.resources) * m,
                      cplx{0.0, 0.0});
    for (int r = 0; r < 2; ++r) {
      const int k = cb.active_resources[r];
      const auto& row = (r == 0 ? ref.first : ref.second)[t.at(k, j) - 1];
      for (int col = 0; col < m; ++col) cb.entries[k * m + col] = row[col];
    }
  }

  validate_codebook_set(cs);
  cs.design_point = fit_design_point(cs, t);
  return cs;
}

}  // namespace

CodebookSet reference_codebooks(std::string_view id) {
  if (id == kSetA.id) return assemble(kSetA);
  if (id == kSetB.id) return assemble(kSetB);
  throw std::invalid_argument("unknown reference codebook '" +
                              std::string(id) + "' (known: A_4x6_M4 B_5x10_M4)");
}

std::vector<std::string> reference_ids() { return {"A_4x6_M4", "B_5x10_M4"}; }

}  // namespace scma
