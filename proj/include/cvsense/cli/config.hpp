#pragma once

// Flat key-value configuration files:
//
//   # comment
//   M       = 4
//   eta     = 1, 0.8
//   scheme  = entangled, product
//
// One `key = value` per line; lists are comma separated. Unknown or repeated keys are
// errors, reported with the line they occur on.

#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cvsense::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParamKind { integer, real, text, integer_list, real_list, text_list };

struct ParamSpec {
    std::string key;
    ParamKind kind;
    /// Null when the parameter has no default (optional or resolved by the command).
    nlohmann::json fallback;
    std::string help;
    /// Command-line flag without dashes; empty means the key with '_' -> '-', lower case.
    std::string flag = {};
};

std::string flag_name(const ParamSpec& spec);

struct ConfigEntry {
    std::string value;
    int line = 0;
};

struct ConfigFile {
    std::string source;
    std::map<std::string, ConfigEntry> entries;
};

ConfigFile parse_config(std::istream& in, const std::string& source);
ConfigFile load_config(const std::filesystem::path& path);

/// Converts raw text to JSON per `kind`; `where` prefixes error messages.
nlohmann::json convert_value(const std::string& text, ParamKind kind, const std::string& where);

/// Parameters for a command: defaults, then config entries, then `overrides` (raw text by
/// key, e.g. from command-line flags). Keys outside `schema` are errors.
nlohmann::json resolve_params(const std::vector<ParamSpec>& schema, const ConfigFile* config,
                              const std::map<std::string, std::string>& overrides);

}  // namespace cvsense::cli
