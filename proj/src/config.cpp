#include "hombfc/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>

namespace hombfc {
namespace {

constexpr std::array<std::string_view, 7> kRequired = {"m",   "mu",    "sigma",     "delta",
                                                       "phi", "gamma", "visibility"};
constexpr std::array<std::string_view, 3> kOptional = {"abs_tol", "rel_tol",
                                                       "max_subdivisions"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool known(std::string_view key) {
  for (const auto k : kRequired) {
    if (k == key) return true;
  }
  for (const auto k : kOptional) {
    if (k == key) return true;
  }
  return false;
}

double to_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 1 || value > 1'000'000) {
    throw ConfigError(key + ": expected an integer in [1, 1000000], got '" + text + "'");
  }
  return static_cast<int>(value);
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  std::map<std::string, std::string, std::less<>> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    if (!known(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw ConfigError(key + ": missing value");
    if (!values.emplace(key, value).second) throw ConfigError(key + ": key given twice");
  }
  for (const auto key : kRequired) {
    if (!values.contains(key)) {
      throw ConfigError("missing key '" + std::string(key) + "'");
    }
  }

  RunConfig cfg;
  cfg.params.m = to_int("m", values.at("m"));
  cfg.params.mu = to_real("mu", values.at("mu"));
  cfg.params.sigma = to_real("sigma", values.at("sigma"));
  cfg.params.delta = to_real("delta", values.at("delta"));
  cfg.params.phi = to_real("phi", values.at("phi"));
  cfg.channel.gamma = to_real("gamma", values.at("gamma"));
  cfg.channel.visibility = to_real("visibility", values.at("visibility"));
  if (const auto it = values.find("abs_tol"); it != values.end()) {
    cfg.quad.abs_tol = to_real("abs_tol", it->second);
  }
  if (const auto it = values.find("rel_tol"); it != values.end()) {
    cfg.quad.rel_tol = to_real("rel_tol", it->second);
  }
  if (const auto it = values.find("max_subdivisions"); it != values.end()) {
    cfg.quad.max_subdivisions = to_int("max_subdivisions", it->second);
  }

  try {
    cfg.params.validate();
    cfg.channel.validate();
    cfg.quad.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.params.m = 3;
  cfg.params.mu = 3.0;
  return cfg;
}

}  // namespace hombfc
