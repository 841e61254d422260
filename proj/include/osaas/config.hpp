#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace osaas {

// Verbosity from the OSAAS_LOG environment variable:
// 0 = quiet, 1 = info (default), 2 = debug.
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

// Parses a flat JSON object of per-subcommand settings. Any key outside
// `allowed` is an error, so typos cannot silently fall back to defaults.
nlohmann::json load_config_file(const std::string& path, const std::vector<std::string>& allowed);

}  // namespace osaas
