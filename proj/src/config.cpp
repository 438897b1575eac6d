#include "advparam/config.hpp"

#include "advparam/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace advparam {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T convert(const std::string& key, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw UsageError("config key '" + key + "': cannot parse '" + text + "'");
  return v;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(number) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? convert<double>(key, *v) : fallback;
}

long Config::get_int(const std::string& key, long fallback) const {
  const auto v = get(key);
  return v ? convert<long>(key, *v) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw UsageError("config key '" + key + "': expected a boolean");
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(convert<double>("list", item));
  }
  return out;
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> fallback) const {
  const auto v = get(key);
  return v ? parse_double_list(*v) : fallback;
}

}  // namespace advparam
