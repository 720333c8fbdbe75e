#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pmtm {

// A flat, sectioned key/value document (a small TOML subset):
//
//   # comment
//   [section]
//   key = 1.5            # number
//   name = "pi4"         # string
//   flag = true          # boolean
//   list = [0.5, 1, 2]   # array of numbers or strings
//
// Keys are addressed as "section.key"; keys before the first section header
// live in section "".
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::string_view text);
  static KeyValueDocument load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_integer(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<double>> get_doubles(const std::string& key) const;
  std::optional<std::vector<std::string>> get_strings(const std::string& key) const;

  // Throws ConfigError naming the first key not in `known`.
  void reject_unknown(const std::vector<std::string>& known) const;

 private:
  // Raw right-hand sides, already stripped of comments and whitespace.
  std::map<std::string, std::string> values_;
};

}  // namespace pmtm
