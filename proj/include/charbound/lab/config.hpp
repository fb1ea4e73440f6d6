#pragma once

// Sweep configuration: flat UTF-8 text, one `key = value` per line, `#`
// starts a comment, lists are comma separated. Group moduli lists accept
// `n^k` as shorthand for k copies of n (e.g. `g = 2^12`).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "charbound/group.hpp"

namespace charbound::lab {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Experiment { corollary1, propk, homgrowth };
enum class MapPolicy { walsh_paley, random_injection, sidon_injection, identity };

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::corollary1: return "corollary1";
        case Experiment::propk: return "propk";
        case Experiment::homgrowth: return "homgrowth";
    }
    return "?";
}

inline std::string to_string(MapPolicy p) {
    switch (p) {
        case MapPolicy::walsh_paley: return "walsh_paley";
        case MapPolicy::random_injection: return "random_injection";
        case MapPolicy::sidon_injection: return "sidon_injection";
        case MapPolicy::identity: return "identity";
    }
    return "?";
}

inline Experiment parse_experiment(const std::string& s) {
    if (s == "corollary1") return Experiment::corollary1;
    if (s == "propk") return Experiment::propk;
    if (s == "homgrowth") return Experiment::homgrowth;
    throw ConfigError("unknown experiment '" + s + "'");
}

inline MapPolicy parse_policy(const std::string& s) {
    if (s == "walsh_paley") return MapPolicy::walsh_paley;
    if (s == "random_injection") return MapPolicy::random_injection;
    if (s == "sidon_injection") return MapPolicy::sidon_injection;
    if (s == "identity") return MapPolicy::identity;
    throw ConfigError("unknown map policy '" + s + "'");
}

struct SweepConfig {
    Experiment experiment = Experiment::corollary1;
    // corollary1: G = (Z/2)^k for k in [k_min, k_max], H = Z/N
    unsigned k_min = 1;
    unsigned k_max = 4;
    u64 N = 1009;
    // propk: Lambda in g (the dual G^), phi into h (H^)
    // homgrowth: G = g, H = h, domain H^n for n in [n_min, n_max]
    std::vector<u64> g;
    std::vector<u64> h;
    unsigned n_min = 1;
    unsigned n_max = 3;
    std::vector<std::size_t> sizes;  // propk |Lambda| values, 0 = whole dual
    std::vector<double> p{1.0};
    MapPolicy policy = MapPolicy::sidon_injection;
    std::vector<u64> m{2};
    u64 seed = 1;
    unsigned seeds = 1;  // random instances per grid point
    unsigned restarts = 8;
    unsigned iterations = 40;
    unsigned sidon_iterations = 0;  // 0 = 20 per domain element
    u64 surplus = 0;                // homgrowth: extra points of S beyond |H^n|
    unsigned threads = 1;
    bool timing = false;  // adds a wall_time column (breaks byte-identical output)
    std::string out;
    std::string svg;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline u64 parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    }
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

inline std::vector<u64> parse_moduli(const std::string& key, const std::string& v) {
    std::vector<u64> out;
    for (const auto& tok : split_list(v)) {
        const auto caret = tok.find('^');
        if (caret == std::string::npos) {
            out.push_back(parse_u64(key, tok));
            continue;
        }
        const u64 base = parse_u64(key, trim(tok.substr(0, caret)));
        const u64 count = parse_u64(key, trim(tok.substr(caret + 1)));
        if (count > 64) throw ConfigError("key '" + key + "': repeat count too large");
        out.insert(out.end(), count, base);
    }
    return out;
}

}  // namespace detail

using KeyValues = std::map<std::string, std::string>;

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "experiment", "k_min",   "k_max",      "N",          "g",       "h",       "n_min",
        "n_max",      "sizes",   "p",          "policy",     "m",       "seed",    "seeds",
        "restarts",   "iterations", "sidon_iterations", "surplus", "threads", "timing", "out",
        "svg"};
    return keys;
}

inline KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

inline KeyValues read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

/// Applies `kv` on top of `base` (later sources override earlier ones).
inline SweepConfig apply_key_values(SweepConfig cfg, const KeyValues& kv) {
    using namespace detail;
    for (const auto& [key, v] : kv) {
        if (key == "experiment") cfg.experiment = parse_experiment(v);
        else if (key == "k_min") cfg.k_min = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "k_max") cfg.k_max = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "N") cfg.N = parse_u64(key, v);
        else if (key == "g") cfg.g = parse_moduli(key, v);
        else if (key == "h") cfg.h = parse_moduli(key, v);
        else if (key == "n_min") cfg.n_min = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "n_max") cfg.n_max = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "sizes") {
            cfg.sizes.clear();
            for (const auto& t : split_list(v)) cfg.sizes.push_back(t == "full" ? 0 : parse_u64(key, t));
        } else if (key == "p") {
            cfg.p.clear();
            for (const auto& t : split_list(v)) cfg.p.push_back(parse_double(key, t));
        } else if (key == "policy") cfg.policy = parse_policy(v);
        else if (key == "m") {
            cfg.m.clear();
            for (const auto& t : split_list(v)) cfg.m.push_back(parse_u64(key, t));
        } else if (key == "seed") cfg.seed = parse_u64(key, v);
        else if (key == "seeds") cfg.seeds = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "restarts") cfg.restarts = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "iterations") cfg.iterations = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "sidon_iterations") cfg.sidon_iterations = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "surplus") cfg.surplus = parse_u64(key, v);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_u64(key, v));
        else if (key == "timing") cfg.timing = parse_bool(key, v);
        else if (key == "out") cfg.out = v;
        else if (key == "svg") cfg.svg = v;
        else throw ConfigError("unknown key '" + key + "'");
    }
    return cfg;
}

inline u64 checked_order(const std::vector<u64>& mods, const char* what) {
    try {
        return GroupSpec(mods).order();
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

inline void validate(const SweepConfig& c) {
    if (c.p.empty()) throw ConfigError("p grid is empty");
    if (c.seeds == 0) throw ConfigError("seeds must be >= 1");
    if (c.threads == 0) throw ConfigError("threads must be >= 1");
    if (c.m.empty()) throw ConfigError("m list is empty");
    for (u64 m : c.m)
        if (m == 0) throw ConfigError("m must be >= 1");

    switch (c.experiment) {
        case Experiment::corollary1: {
            for (double p : c.p)
                if (!(p >= 1.0 && p < 2.0)) throw ConfigError("p values must lie in [1, 2)");
            if (c.k_min < 1 || c.k_min > c.k_max) throw ConfigError("k range is empty or starts below 1");
            if (c.k_max > 12) throw ConfigError("k_max must be <= 12");
            if (c.N % 2 == 0) throw ConfigError("N must be odd");
            if (c.N <= (u64{1} << c.k_max)) throw ConfigError("N must exceed 2^k_max");
            if (c.policy == MapPolicy::identity) throw ConfigError("identity policy is not available for corollary1");
            break;
        }
        case Experiment::propk: {
            if (c.g.empty() || c.h.empty()) throw ConfigError("propk needs g and h");
            const u64 go = checked_order(c.g, "g");
            const u64 ho = checked_order(c.h, "h");
            if (go < 2 || ho < 2) throw ConfigError("g and h must be nontrivial");
            if (go > (u64{1} << 20) || ho > (u64{1} << 20)) throw ConfigError("g and h are capped at order 2^20");
            if (c.sizes.empty()) throw ConfigError("propk needs a nonempty sizes list");
            for (std::size_t s : c.sizes) {
                const u64 sz = s == 0 ? go : s;
                if (sz > go) throw ConfigError("size exceeds |g|");
                if (sz > 4096) throw ConfigError("sizes are capped at 4096");
                if (c.policy != MapPolicy::identity && c.policy != MapPolicy::walsh_paley && sz > ho)
                    throw ConfigError("an injection needs size <= |h|");
            }
            if (c.policy == MapPolicy::identity && !(GroupSpec(c.g) == GroupSpec(c.h)))
                throw ConfigError("identity policy needs g == h");
            break;
        }
        case Experiment::homgrowth: {
            if (c.g.empty() || c.h.empty()) throw ConfigError("homgrowth needs g and h");
            const u64 go = checked_order(c.g, "g");
            const u64 ho = checked_order(c.h, "h");
            if (go < 2 || ho < 2) throw ConfigError("g and h must be nontrivial");
            if (go > (u64{1} << 16)) throw ConfigError("|G| is capped at 2^16");
            if (c.n_min < 1 || c.n_min > c.n_max) throw ConfigError("n range is empty or starts below 1");
            u64 hn = 1;
            for (unsigned i = 0; i < c.n_max; ++i) {
                hn *= ho;
                if (hn > 4096) throw ConfigError("|H^n_max| is capped at 4096");
            }
            if (c.policy == MapPolicy::identity) throw ConfigError("identity policy is not available for homgrowth");
            break;
        }
    }
}

}  // namespace charbound::lab
