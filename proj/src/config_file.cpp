#include "pmtm/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pmtm/errors.hpp"

namespace pmtm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool is_bare_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::optional<double> to_double(std::string_view raw) {
  double v = 0.0;
  const char* end = raw.data() + raw.size();
  auto [ptr, ec] = std::from_chars(raw.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::string> to_string_value(std::string_view raw) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') return std::nullopt;
  return std::string(raw.substr(1, raw.size() - 2));
}

std::vector<std::string_view> split_array(std::string_view raw, const std::string& key) {
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
    throw ConfigError("'" + key + "' must be an array");
  }
  std::vector<std::string_view> items;
  std::string_view body = trim(raw.substr(1, raw.size() - 2));
  if (body.empty()) return items;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i < body.size() && body[i] == '"') quoted = !quoted;
    if (i == body.size() || (body[i] == ',' && !quoted)) {
      items.push_back(trim(body.substr(start, i - start)));
      start = i + 1;
    }
  }
  return items;
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(name)) throw ConfigError(where + "bad section name");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!is_bare_key(key)) throw ConfigError(where + "bad key");
    if (value.empty()) throw ConfigError(where + "missing value");
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (!doc.values_.emplace(full, std::string(value)).second) {
      throw ConfigError(where + "duplicate key '" + full + "'");
    }
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<std::string> KeyValueDocument::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  auto v = to_string_value(it->second);
  if (!v) throw ConfigError("'" + key + "' must be a quoted string");
  return v;
}

std::optional<double> KeyValueDocument::get_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  auto v = to_double(it->second);
  if (!v) throw ConfigError("'" + key + "' must be a number");
  return v;
}

std::optional<long long> KeyValueDocument::get_integer(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  const std::string& raw = it->second;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size()) {
    throw ConfigError("'" + key + "' must be an integer");
  }
  return v;
}

std::optional<bool> KeyValueDocument::get_bool(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw ConfigError("'" + key + "' must be true or false");
}

std::optional<std::vector<double>> KeyValueDocument::get_doubles(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  std::vector<double> out;
  for (std::string_view item : split_array(it->second, key)) {
    auto v = to_double(item);
    if (!v) throw ConfigError("'" + key + "' must hold numbers");
    out.push_back(*v);
  }
  return out;
}

std::optional<std::vector<std::string>> KeyValueDocument::get_strings(
    const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  std::vector<std::string> out;
  for (std::string_view item : split_array(it->second, key)) {
    auto v = to_string_value(item);
    if (!v) throw ConfigError("'" + key + "' must hold quoted strings");
    out.push_back(std::move(*v));
  }
  return out;
}

void KeyValueDocument::reject_unknown(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

}  // namespace pmtm
