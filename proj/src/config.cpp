#include "osaas/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "osaas/errors.hpp"

namespace osaas {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("OSAAS_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << msg << '\n';
}

nlohmann::json load_config_file(const std::string& path, const std::vector<std::string>& allowed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError("unknown config key '" + key + "' in " + path + " (known keys: " + known + ")");
    }
  }
  return j;
}

}  // namespace osaas
