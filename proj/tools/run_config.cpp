#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scma::tools {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad(const std::string& what) {
  throw std::invalid_argument(what);
}

}  // namespace

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_text(text.str());
  } catch (const std::invalid_argument& e) {
    bad(path.string() + ": " + e.what());
  }
}

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  Section* current = nullptr;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        bad("line " + std::to_string(lineno) + ": malformed section header");
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (cfg.find_section(name)) {
        bad("line " + std::to_string(lineno) + ": duplicate section [" + name +
            "]");
      }
      cfg.sections_.push_back({name, {}});
      current = &cfg.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (!current) {
      bad("line " + std::to_string(lineno) + ": key before any [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      bad("line " + std::to_string(lineno) + ": empty key");
    }
    for (const Entry& e : current->entries) {
      if (e.key == key) {
        bad("line " + std::to_string(lineno) + ": duplicate key " +
            current->name + "." + key);
      }
    }
    current->entries.push_back({key, trim(line.substr(eq + 1)), false});
  }
  return cfg;
}

RunConfig::Section* RunConfig::find_section(const std::string& name) {
  for (Section& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const RunConfig::Section* RunConfig::find_section(
    const std::string& name) const {
  for (const Section& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

RunConfig::Entry* RunConfig::find_entry(const std::string& section,
                                        const std::string& key) {
  Section* s = find_section(section);
  if (!s) return nullptr;
  for (Entry& e : s->entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const RunConfig::Entry* RunConfig::find_entry(const std::string& section,
                                              const std::string& key) const {
  const Section* s = find_section(section);
  if (!s) return nullptr;
  for (const Entry& e : s->entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  return find_entry(section, key) != nullptr;
}

std::string RunConfig::get_string(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) {
  Entry* e = find_entry(section, key);
  if (!e) return fallback;
  e->consumed = true;
  return e->value;
}

std::string RunConfig::require_string(const std::string& section,
                                      const std::string& key) {
  Entry* e = find_entry(section, key);
  if (!e) bad("missing required config key " + section + "." + key);
  e->consumed = true;
  return e->value;
}

double RunConfig::get_double(const std::string& section,
                             const std::string& key, double fallback) {
  Entry* e = find_entry(section, key);
  if (!e) return fallback;
  e->consumed = true;
  try {
    std::size_t used = 0;
    const double v = std::stod(e->value, &used);
    if (used != e->value.size()) throw std::invalid_argument(e->value);
    return v;
  } catch (const std::exception&) {
    bad("config key " + section + "." + key + " is not a number: '" +
        e->value + "'");
  }
}

std::int64_t RunConfig::get_int(const std::string& section,
                                const std::string& key, std::int64_t fallback) {
  Entry* e = find_entry(section, key);
  if (!e) return fallback;
  e->consumed = true;
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(e->value, &used);
    if (used != e->value.size()) throw std::invalid_argument(e->value);
    return v;
  } catch (const std::exception&) {
    bad("config key " + section + "." + key + " is not an integer: '" +
        e->value + "'");
  }
}

std::uint64_t RunConfig::get_uint64(const std::string& section,
                                    const std::string& key,
                                    std::uint64_t fallback) {
  Entry* e = find_entry(section, key);
  if (!e) return fallback;
  e->consumed = true;
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(e->value, &used);
    if (used != e->value.size() || e->value.find('-') != std::string::npos) {
      throw std::invalid_argument(e->value);
    }
    return v;
  } catch (const std::exception&) {
    bad("config key " + section + "." + key +
        " is not a non-negative integer: '" + e->value + "'");
  }
}

std::optional<std::uint64_t> RunConfig::get_optional_uint64(
    const std::string& section, const std::string& key) {
  if (!has(section, key)) return std::nullopt;
  return get_uint64(section, key, 0);
}

std::vector<double> RunConfig::get_double_list(const std::string& section,
                                               const std::string& key) {
  Entry* e = find_entry(section, key);
  if (!e) bad("missing required config key " + section + "." + key);
  e->consumed = true;
  std::vector<double> out;
  std::string token;
  std::istringstream items(e->value);
  while (std::getline(items, token, ',')) {
    const std::string t = trim(token);
    if (t.empty()) {
      bad("config key " + section + "." + key + " has an empty element");
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      bad("config key " + section + "." + key + " element is not a number: '" +
          t + "'");
    }
  }
  if (out.empty()) bad("config key " + section + "." + key + " is empty");
  return out;
}

void RunConfig::finish() const {
  std::string unknown;
  for (const Section& s : sections_) {
    for (const Entry& e : s.entries) {
      if (!e.consumed) {
        if (!unknown.empty()) unknown += ", ";
        unknown += s.name + "." + e.key;
      }
    }
  }
  if (!unknown.empty()) bad("unknown config keys: " + unknown);
}

void RunConfig::set(const std::string& section, const std::string& key,
                    std::string value) {
  Section* s = find_section(section);
  if (!s) {
    sections_.push_back({section, {}});
    s = &sections_.back();
  }
  for (Entry& e : s->entries) {
    if (e.key == key) {
      e.value = std::move(value);
      return;
    }
  }
  s->entries.push_back({key, std::move(value), true});
}

std::string RunConfig::format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void RunConfig::set_double(const std::string& section, const std::string& key,
                           double value) {
  set(section, key, format_double(value));
}

void RunConfig::set_double_list(const std::string& section,
                                const std::string& key,
                                const std::vector<double>& values) {
  std::string joined;
  for (double v : values) {
    if (!joined.empty()) joined += ", ";
    joined += format_double(v);
  }
  set(section, key, joined);
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  bool first = true;
  for (const Section& s : sections_) {
    if (!first) out << '\n';
    first = false;
    out << '[' << s.name << "]\n";
    for (const Entry& e : s.entries) {
      out << e.key << " = " << e.value << '\n';
    }
  }
  return out.str();
}

void RunConfig::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path.string());
  out << to_text();
}

}  // namespace scma::tools
