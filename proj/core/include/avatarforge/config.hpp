#pragma once

#include <set>
#include <string>

#include <nlohmann/json.hpp>

namespace avatarforge {

// Minimal TOML-style reader covering what the pipeline configs need:
// [dotted.section] headers (segments may be basic-quoted), key = value with
// string / integer / float / boolean / flat-array values, and # comments.
// The result is a JSON object tree. Duplicate keys and syntax errors throw
// Error(ConfigError) with a line number.
nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::string& path);

// Fail-closed key validation: every key of `object` must be in `allowed`,
// otherwise Error(ConfigError) names the offender (typos in threshold names
// surface immediately).
void require_known_keys(const nlohmann::json& object, const std::set<std::string>& allowed,
                        const std::string& where);

}  // namespace avatarforge
