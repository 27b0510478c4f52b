#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cli {

enum class KeyType { real, integer, seed, boolean, text, real_list, int_list };

struct KeySpec {
    std::string name;
    KeyType type;
    bool required = false;
    nlohmann::json fallback;  // null when required or optional without default
    std::string help;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<KeySpec> keys;
    const KeySpec* find(const std::string& key) const;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error("config key '" + key + "': " + msg), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

const std::vector<CommandSpec>& commands();
const CommandSpec& command(const std::string& name);

// Parses a flag value according to the key type ("1e-3", "true", "0.25,0.5").
nlohmann::json parse_flag(const KeySpec& k, const std::string& text);

// Merges file config and flags (flags win), rejects unknown keys, checks
// types, fills defaults and fails on missing required keys.
nlohmann::json resolve(const CommandSpec& spec, const nlohmann::json& file, const nlohmann::json& flags);

}  // namespace cli
