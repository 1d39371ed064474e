#ifndef SCMA_TOOLS_RUN_CONFIG_HPP
#define SCMA_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scma::tools {

/// INI-style run configuration: `[section]` headers over flat `key = value`
/// lines, `#`/`;` comments. Sections and keys keep file order so an emitted
/// manifest is stable.
class RunConfig {
 public:
  RunConfig() = default;
  static RunConfig parse_file(const std::filesystem::path& path);
  static RunConfig parse_text(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;

  // Readers mark keys consumed; finish() rejects anything left over, so a
  // typo in a config never goes unnoticed.
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  std::string require_string(const std::string& section,
                             const std::string& key);
  double get_double(const std::string& section, const std::string& key,
                    double fallback);
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback);
  std::uint64_t get_uint64(const std::string& section, const std::string& key,
                           std::uint64_t fallback);
  std::optional<std::uint64_t> get_optional_uint64(const std::string& section,
                                                   const std::string& key);
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key);
  bool has_list(const std::string& section, const std::string& key) const {
    return has(section, key);
  }

  /// Throws std::invalid_argument naming every unconsumed section.key.
  void finish() const;

  void set(const std::string& section, const std::string& key,
           std::string value);
  void set_double(const std::string& section, const std::string& key,
                  double value);
  void set_double_list(const std::string& section, const std::string& key,
                       const std::vector<double>& values);

  /// Serialize back to INI text / file (the manifest format).
  std::string to_text() const;
  void write(const std::filesystem::path& path) const;

  /// Shortest exact decimal form of a double (round-trips on reread).
  static std::string format_double(double value);

 private:
  struct Entry {
    std::string key;
    std::string value;
    bool consumed = false;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
  };
  std::vector<Section> sections_;

  Section* find_section(const std::string& name);
  const Section* find_section(const std::string& name) const;
  Entry* find_entry(const std::string& section, const std::string& key);
  const Entry* find_entry(const std::string& section,
                          const std::string& key) const;
};

}  // namespace scma::tools

#endif
