#include <fstream>
#include <string>

#include "json.hpp"
#include "scma/codebook.hpp"

namespace scma {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kSchema = "scma-codebook/1";

std::string provenance_label(Provenance p) {
  switch (p) {
    case Provenance::Generated: return "generated";
    case Provenance::Reference: return "reference";
    case Provenance::Loaded: return "loaded";
  }
  return "generated";
}

}  // namespace

void save_codebooks(const CodebookSet& cs, const std::filesystem::path& path) {
  ordered_json doc;
  doc["schema"] = kSchema;
  doc["modulation_order"] = cs.modulation_order;
  doc["users"] = cs.users;
  doc["resources"] = cs.resources;
  if (cs.template_name) doc["template"] = *cs.template_name;
  doc["provenance"] = provenance_label(cs.provenance);
  doc["provenance_detail"] = cs.provenance_detail;
  if (cs.design_point) {
    doc["design_point"] = {{"energies", cs.design_point->energies},
                           {"phases", cs.design_point->phases},
                           {"omega", cs.design_point->omega}};
  }

  ordered_json books = ordered_json::array();
  for (const Codebook& cb : cs.codebooks) {
    ordered_json rows = ordered_json::array();
    for (int k = 0; k < cb.resources; ++k) {
      ordered_json row = ordered_json::array();
      for (int m = 0; m < cb.modulation_order; ++m) {
        const cplx v = cb.at(k, m);
        row.push_back({v.real(), v.imag()});
      }
      rows.push_back(std::move(row));
    }
    books.push_back(std::move(rows));
  }
  doc["codebooks"] = std::move(books);

  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write codebook file " + path.string());
  }
  out << doc.dump(2) << '\n';
}

CodebookSet load_codebooks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open codebook file " + path.string());
  }
  ordered_json doc;
  try {
    in >> doc;
  } catch (const ordered_json::exception& e) {
    throw ValidationError("codebook file " + path.string() +
                          " is not valid JSON: " + e.what());
  }

  try {
    if (doc.value("schema", "") != kSchema) {
      throw ValidationError("codebook file " + path.string() +
                            " does not declare schema " + kSchema);
    }

    CodebookSet cs;
    cs.modulation_order = doc.at("modulation_order").get<int>();
    cs.users = doc.at("users").get<int>();
    cs.resources = doc.at("resources").get<int>();
    if (doc.contains("template")) {
      cs.template_name = doc.at("template").get<std::string>();
      cs.superposed = builtin_template(*cs.template_name).superposed;
    }
    cs.provenance = Provenance::Loaded;
    cs.provenance_detail = doc.value("provenance_detail", path.string());
    if (doc.contains("design_point")) {
      const auto& dp = doc.at("design_point");
      cs.design_point =
          DesignPoint{dp.at("energies").get<std::vector<double>>(),
                      dp.at("phases").get<std::vector<double>>(),
                      dp.at("omega").get<double>()};
    }

    const auto& books = doc.at("codebooks");
    if (!books.is_array() ||
        books.size() != static_cast<std::size_t>(cs.users)) {
      throw ValidationError("codebook file must carry one codebook per user");
    }
    cs.codebooks.resize(cs.users);
    for (int j = 0; j < cs.users; ++j) {
      Codebook& cb = cs.codebooks[j];
      cb.user_index = j;
      cb.resources = cs.resources;
      cb.modulation_order = cs.modulation_order;
      cb.entries.assign(
          static_cast<std::size_t>(cs.resources) * cs.modulation_order,
          cplx{0.0, 0.0});
      const auto& rows = books.at(j);
      if (!rows.is_array() ||
          rows.size() != static_cast<std::size_t>(cs.resources)) {
        throw ValidationError("codebook " + std::to_string(j + 1) +
                              " must have one row per resource");
      }
      cb.active_resources = {-1, -1};
      int found = 0;
      for (int k = 0; k < cs.resources; ++k) {
        const auto& row = rows.at(k);
        if (!row.is_array() ||
            row.size() != static_cast<std::size_t>(cs.modulation_order)) {
          throw ValidationError("codebook " + std::to_string(j + 1) + " row " +
                                std::to_string(k + 1) +
                                " must have one entry per codeword");
        }
        bool any = false;
        for (int m = 0; m < cs.modulation_order; ++m) {
          const auto& cell = row.at(m);
          if (!cell.is_array() || cell.size() != 2) {
            throw ValidationError("codebook entries must be [re, im] pairs");
          }
          const cplx v{cell.at(0).get<double>(), cell.at(1).get<double>()};
          cb.entries[k * cs.modulation_order + m] = v;
          if (v != cplx{0.0, 0.0}) any = true;
        }
        if (any && found < 2) cb.active_resources[found] = k;
        if (any) ++found;
      }
    }

    validate_codebook_set(cs);
    return cs;
  } catch (const ordered_json::exception& e) {
    throw ValidationError("codebook file " + path.string() +
                          " is malformed: " + e.what());
  }
}

}  // namespace scma
