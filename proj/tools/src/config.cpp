#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace weaktime::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

}  // namespace

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys{
      "units.hbar",        "units.mass",
      "barrier.type",      "barrier.strength",  "barrier.height",   "barrier.width",
      "packet.p_mean",     "packet.sigma",      "packet.x0",
      "grid.min",          "grid.max",          "grid.points",
      "quad.tolerance",    "quad.max_panels",
      "asymptotic.x2",
      "arrival.X",         "arrival.dt",        "arrival.p",        "arrival.sweep",
      "arrival.min",       "arrival.max",       "arrival.points",   "arrival.spacing",
      "arrival.packet_p_mean", "arrival.packet_sigma", "arrival.packet_x0",
      "twolevel.omega",    "twolevel.v",        "twolevel.v_phase", "twolevel.t_min",
      "twolevel.t_max",    "twolevel.points",
      "weak.lambda",       "weak.levels",       "weak.tau",         "weak.final",
      "weak.level",        "weak.coefficient",  "weak.sigma_q",     "weak.dt_post",
      "validate.samples",
      "output.format",
  };
  return keys;
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int lineno = 0;
  const auto& keys = known_keys();
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(key + ": unknown key (" + where + ")");
    }
    if (value.empty()) throw ConfigError(key + ": empty value (" + where + ")");
    if (cfg.values_.count(key)) throw ConfigError(key + ": duplicate key (" + where + ")");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config: cannot open '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key + ": unknown key");
  values_[key] = value;
}

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key + ": required key is missing");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(key, get_string(key)); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::optional<double> Config::get_optional(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

long Config::get_int(const std::string& key) const {
  const std::string text = get_string(key);
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

long Config::get_int(const std::string& key, long fallback) const { return has(key) ? get_int(key) : fallback; }

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

}  // namespace weaktime::cli
