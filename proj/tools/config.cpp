#include "config.hpp"

#include <cmath>
#include <sstream>

namespace cli {

namespace {

using nlohmann::json;

KeySpec req(std::string n, KeyType t, std::string h) { return {std::move(n), t, true, nullptr, std::move(h)}; }
KeySpec opt(std::string n, KeyType t, json d, std::string h) { return {std::move(n), t, false, std::move(d), std::move(h)}; }

std::vector<KeySpec> common(std::vector<KeySpec> keys) {
    keys.push_back(opt("out", KeyType::text, nullptr, "output directory"));
    keys.push_back(opt("threads", KeyType::integer, nullptr, "worker threads"));
    return keys;
}

std::vector<CommandSpec> build() {
    using K = KeyType;
    std::vector<CommandSpec> c;
    c.push_back({"simulate-flow", "divergent flow on a cone grid and its inverse trace",
                 common({req("seed", K::seed, "driver seed"), opt("du", K::real, 1e-3, "u step"),
                         opt("horizon", K::real, 10.0, "u horizon"), opt("dy", K::real, 1e-2, "grid spacing"),
                         opt("stride", K::integer, 10, "stored row stride"),
                         opt("tolerance", K::real, 1e-2, "trace oscillation tolerance"),
                         opt("window", K::real, 0.1, "trailing window fraction")})});
    c.push_back({"simulate-diffusion", "self-repelling diffusion from the flow",
                 common({req("seed", K::seed, "seed"), opt("profile", K::text, "constant", "constant or gff"),
                         opt("lambda", K::real, 1.0, "constant profile value"), opt("left", K::real, -4.0, "left end"),
                         opt("right", K::real, 4.0, "right end"), opt("x0", K::real, 0.0, "start"),
                         opt("a", K::real, 1.0, "gff value at 0"), opt("level", K::integer, 6, "gff lattice level"),
                         opt("half_width", K::real, 100.0, "gff window"), opt("du", K::real, 1e-4, "u step"),
                         opt("u_horizon", K::real, 25.0, "u horizon"), opt("bin_width", K::real, 0.0, "0 means sqrt(du)"),
                         opt("backend", K::text, "occupation", "occupation or grid"),
                         opt("epsilon", K::real, nullptr, "stop when lambda at the particle drops to this"),
                         opt("sample_times", K::real_list, json::array(), "times at which X is recorded"),
                         opt("path_stride", K::integer, 100, "stored path stride")})});
    c.push_back({"simulate-discrete", "discrete self-repelling processes",
                 common({req("seed", K::seed, "seed"),
                         opt("process", K::text, "lattice", "jump, lattice, forward or reversed"),
                         opt("level", K::integer, 4, "lattice level"), opt("lambda", K::real, 1.0, "constant profile"),
                         opt("left", K::real, -4.0, "left end"), opt("right", K::real, 4.0, "right end"),
                         opt("epsilon", K::real, 0.1, "lattice stop level"), opt("a", K::real, 1.0, "field value at 0"),
                         opt("half_sites", K::integer, 2, "triples: sites on each side of 0"),
                         opt("opening", K::text, "consistent", "consistent or exponential")})});
    c.push_back({"verify-rk", "Ray-Knight identity",
                 common({req("a", K::real, "value at 0"), req("level", K::integer, "lattice level"),
                         req("replicas", K::integer, "replicas per side"), req("seed", K::seed, "seed"),
                         opt("sites", K::real_list, json::array({0.25, 0.5, 1.0}), "sites"),
                         opt("alpha", K::real, 0.01, "level")})});
    c.push_back({"verify-inversion", "diffusion on phi^2 against the reversed walk",
                 common({req("a", K::real, "value at 0"), req("level", K::integer, "lattice level"),
                         req("replicas", K::integer, "replicas per side"), req("seed", K::seed, "seed"),
                         opt("alpha", K::real, 0.01, "level"), opt("du", K::real, 1e-4, "u step"),
                         opt("u_horizon", K::real, 25.0, "u horizon"),
                         opt("field_half_width", K::real, 100.0, "field window"),
                         opt("walk_time_cap", K::real, 1e4, "walk time cap"),
                         opt("reversed", K::boolean, true, "false runs the interchanged ordering"),
                         opt("compare_endpoint", K::boolean, false, "gate on the endpoint law too")})});
    c.push_back({"converge", "lattice processes against the diffusion",
                 common({req("replicas", K::integer, "replicas"), req("seed", K::seed, "seed"),
                         opt("lambda", K::real, 1.0, "constant profile"), opt("left", K::real, -4.0, "left end"),
                         opt("right", K::real, 4.0, "right end"), opt("x0", K::real, 0.0, "start"),
                         opt("epsilon", K::real, 0.1, "stop level"),
                         opt("levels", K::int_list, json::array({3, 5, 7}), "lattice levels"),
                         opt("t_fixed", K::real, 0.2, "marginal time"), opt("alpha", K::real, 0.01, "level"),
                         opt("du", K::real, 1e-5, "u step"), opt("bin_width", K::real, 1e-3, "occupation bin")})});
    c.push_back({"cross-rep", "reversed walk mapped onto a constant profile",
                 common({req("replicas", K::integer, "replicas"), req("seed", K::seed, "seed"),
                         opt("a", K::real, 1.0, "value at 0"), opt("level", K::integer, 6, "lattice level"),
                         opt("target_half_width", K::real, 50.0, "target interval half width"),
                         opt("times", K::real_list, json::array({0.1, 0.5}), "marginal times"),
                         opt("alpha", K::real, 0.01, "level"), opt("du", K::real, 1e-4, "u step"),
                         opt("u_horizon", K::real, 25.0, "u horizon"),
                         opt("walk_time_cap", K::real, 1e4, "walk time cap")})});
    c.push_back({"selftest", "quick consistency suite", common({})});
    return c;
}

bool integral(const json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15;
}

json check(const KeySpec& k, const json& v) {
    switch (k.type) {
        case KeyType::real:
            if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(k.name, "expected a number");
            return v.get<double>();
        case KeyType::integer:
            if (!integral(v)) throw ConfigError(k.name, "expected an integer");
            return static_cast<std::int64_t>(v.get<double>());
        case KeyType::seed:
            if (v.is_number_unsigned()) return v;
            if (!integral(v) || v.get<double>() < 0) throw ConfigError(k.name, "expected a nonnegative integer");
            return static_cast<std::uint64_t>(v.get<double>());
        case KeyType::boolean:
            if (!v.is_boolean()) throw ConfigError(k.name, "expected true or false");
            return v;
        case KeyType::text:
            if (!v.is_string()) throw ConfigError(k.name, "expected a string");
            return v;
        case KeyType::real_list: {
            if (!v.is_array()) throw ConfigError(k.name, "expected a list of numbers");
            json out = json::array();
            for (const json& e : v) {
                if (!e.is_number()) throw ConfigError(k.name, "expected a list of numbers");
                out.push_back(e.get<double>());
            }
            return out;
        }
        case KeyType::int_list: {
            if (!v.is_array()) throw ConfigError(k.name, "expected a list of integers");
            json out = json::array();
            for (const json& e : v) {
                if (!integral(e)) throw ConfigError(k.name, "expected a list of integers");
                out.push_back(static_cast<std::int64_t>(e.get<double>()));
            }
            return out;
        }
    }
    return v;
}

}  // namespace

const KeySpec* CommandSpec::find(const std::string& key) const {
    for (const KeySpec& k : keys)
        if (k.name == key) return &k;
    return nullptr;
}

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> c = build();
    return c;
}

const CommandSpec& command(const std::string& name) {
    for (const CommandSpec& c : commands())
        if (c.name == name) return c;
    throw ConfigError("command", "unknown command '" + name + "'");
}

json parse_flag(const KeySpec& k, const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return json(d);
        } catch (const std::exception&) {
            throw ConfigError(k.name, "cannot parse '" + s + "' as a number");
        }
    };
    switch (k.type) {
        case KeyType::text:
            return text;
        case KeyType::boolean:
            if (text == "true" || text == "1") return true;
            if (text == "false" || text == "0") return false;
            throw ConfigError(k.name, "expected true or false, got '" + text + "'");
        case KeyType::seed:
            try {
                std::size_t pos = 0;
                const unsigned long long v = std::stoull(text, &pos);
                if (pos != text.size() || text.front() == '-') throw std::invalid_argument(text);
                return static_cast<std::uint64_t>(v);
            } catch (const std::exception&) {
                throw ConfigError(k.name, "cannot parse '" + text + "' as a seed");
            }
        case KeyType::real_list:
        case KeyType::int_list: {
            json out = json::array();
            std::string s = text;
            if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) out.push_back(number(item));
            return out;
        }
        default:
            return number(text);
    }
}

json resolve(const CommandSpec& spec, const json& file, const json& flags) {
    if (!file.is_null() && !file.is_object()) throw ConfigError("<root>", "config file must hold a JSON object");
    json merged = json::object();
    for (const json* src : {&file, &flags}) {
        if (src->is_null()) continue;
        for (auto it = src->begin(); it != src->end(); ++it) {
            if (it.key() == "command") {
                if (!it.value().is_string() || it.value().get<std::string>() != spec.name)
                    throw ConfigError("command", "config is for a different command");
                continue;
            }
            const KeySpec* k = spec.find(it.key());
            if (!k) throw ConfigError(it.key(), "unknown key for '" + spec.name + "'");
            merged[it.key()] = check(*k, it.value());
        }
    }
    for (const KeySpec& k : spec.keys) {
        if (merged.contains(k.name)) continue;
        if (k.required) throw ConfigError(k.name, "missing required key");
        if (!k.fallback.is_null()) merged[k.name] = check(k, k.fallback);
    }
    return merged;
}

}  // namespace cli
