#include "cvsense/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cvsense::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) items.push_back(trim(item));
    return items;
}

double to_real(const std::string& text, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(where + ": '" + text + "' is not a number");
    }
    return v;
}

long long to_integer(const std::string& text, const std::string& where) {
    // Accept 1e6-style integers, which are common for trial counts.
    const double v = to_real(text, where);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
        throw ConfigError(where + ": '" + text + "' is not an integer");
    }
    return static_cast<long long>(v);
}

}  // namespace

std::string flag_name(const ParamSpec& spec) {
    if (!spec.flag.empty()) return spec.flag;
    std::string flag = spec.key;
    for (char& c : flag) c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return flag;
}

ConfigFile parse_config(std::istream& in, const std::string& source) {
    ConfigFile cfg;
    cfg.source = source;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw.substr(0, raw.find('#')));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        const std::string where = source + ":" + std::to_string(line);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (value.empty()) throw ConfigError(where + ": missing value for '" + key + "'");
        const auto [it, inserted] = cfg.entries.emplace(key, ConfigEntry{value, line});
        if (!inserted) {
            throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " +
                              std::to_string(it->second.line) + ")");
        }
    }
    return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

nlohmann::json convert_value(const std::string& text, ParamKind kind, const std::string& where) {
    switch (kind) {
    case ParamKind::integer:
        return to_integer(text, where);
    case ParamKind::real:
        return to_real(text, where);
    case ParamKind::text:
        return text;
    default:
        break;
    }
    nlohmann::json list = nlohmann::json::array();
    for (const auto& item : split_list(text)) {
        if (item.empty()) throw ConfigError(where + ": empty list item");
        if (kind == ParamKind::integer_list) {
            list.push_back(to_integer(item, where));
        } else if (kind == ParamKind::real_list) {
            list.push_back(to_real(item, where));
        } else {
            list.push_back(item);
        }
    }
    return list;
}

nlohmann::json resolve_params(const std::vector<ParamSpec>& schema, const ConfigFile* config,
                              const std::map<std::string, std::string>& overrides) {
    auto find = [&](const std::string& key) {
        return std::find_if(schema.begin(), schema.end(), [&](const ParamSpec& p) { return p.key == key; });
    };
    nlohmann::json params = nlohmann::json::object();
    for (const auto& spec : schema) params[spec.key] = spec.fallback;

    if (config != nullptr) {
        for (const auto& [key, entry] : config->entries) {
            const std::string where = config->source + ":" + std::to_string(entry.line);
            const auto spec = find(key);
            if (spec == schema.end()) throw ConfigError(where + ": unknown key '" + key + "'");
            params[key] = convert_value(entry.value, spec->kind, where);
        }
    }
    for (const auto& [key, text] : overrides) {
        const auto spec = find(key);
        if (spec == schema.end()) throw ConfigError("unknown parameter '" + key + "'");
        params[key] = convert_value(text, spec->kind, "--" + key);
    }
    return params;
}

}  // namespace cvsense::cli
