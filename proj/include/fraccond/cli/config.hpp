#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraccond/operators/conductivity.hpp"

namespace fraccond::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Invalid configuration: exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable input or unwritable output: exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// View of one JSON object that rejects keys it was not told about.
class Block {
public:
    Block(const Json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config: " + path_ + " must be an object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!ok.count(it.key())) throw ConfigError("config: unknown key " + key(it.key()));
    }

    bool has(const char* k) const { return j_.contains(k); }
    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    const Json& raw(const char* k) const { return j_.at(k); }

    double number(const char* k, std::optional<double> fallback = std::nullopt) const {
        if (!has(k)) return require(k, fallback);
        const Json& v = j_.at(k);
        if (!v.is_number()) throw ConfigError("config: " + key(k) + " must be a number");
        return v.get<double>();
    }

    std::int64_t integer(const char* k, std::optional<std::int64_t> fallback = std::nullopt) const {
        if (!has(k)) return require(k, fallback);
        const Json& v = j_.at(k);
        if (!v.is_number_integer()) throw ConfigError("config: " + key(k) + " must be an integer");
        return v.get<std::int64_t>();
    }

    std::string string(const char* k, std::optional<std::string> fallback = std::nullopt) const {
        if (!has(k)) return require(k, fallback);
        const Json& v = j_.at(k);
        if (!v.is_string()) throw ConfigError("config: " + key(k) + " must be a string");
        return v.get<std::string>();
    }

    bool boolean(const char* k, std::optional<bool> fallback = std::nullopt) const {
        if (!has(k)) return require(k, fallback);
        const Json& v = j_.at(k);
        if (!v.is_boolean()) throw ConfigError("config: " + key(k) + " must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const char* k, std::optional<std::vector<double>> fallback = std::nullopt) const {
        if (!has(k)) return require(k, fallback);
        const Json& v = j_.at(k);
        if (!v.is_array()) throw ConfigError("config: " + key(k) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError("config: " + key(k) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::optional<std::pair<double, double>> interval(const char* k) const {
        if (!has(k) || j_.at(k).is_null()) return std::nullopt;
        const auto v = numbers(k);
        if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError("config: " + key(k) + " must be [lo, hi] with lo <= hi");
        return std::pair{v[0], v[1]};
    }

    Block child(const char* k, std::initializer_list<const char*> allowed) const {
        static const Json empty = Json::object();
        return Block(has(k) ? j_.at(k) : empty, key(k), allowed);
    }

private:
    template <class T>
    T require(const char* k, const std::optional<T>& fallback) const {
        if (!fallback) throw ConfigError("config: missing required key " + key(k));
        return *fallback;
    }

    const Json& j_;
    std::string path_;
};

struct GridConfig {
    double L = 0.0;
    std::int64_t N = 0;
    double omega_lo = 0.0, omega_hi = 0.0;
};

struct GammaConfig {
    std::string profile = "constant";
    double amplitude = 0.0, center = 0.0, width = 1.0, separation = 0.0;
    std::string file;
};

/// Parsed and validated run configuration (schema v1).
struct RunConfig {
    GridConfig grid;
    double s = 0.5;
    int n = 1;
    GammaConfig gamma;
    Json task = Json::object();
    std::uint64_t seed = 0;
    std::string output = "out";
    Json echo; ///< the document as read
};

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON in ") + path + ": " + e.what());
    }
}

inline std::vector<std::pair<double, double>> read_two_column_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) throw ConfigError("malformed row in " + path + ": " + line);
        try {
            rows.emplace_back(std::stod(a), std::stod(b));
        } catch (const std::exception&) {
            if (rows.empty()) continue; // header
            throw ConfigError("malformed row in " + path + ": " + line);
        }
    }
    return rows;
}

/// Checks every key and range; throws ConfigError naming the offending key.
inline RunConfig parse_config(const Json& doc) {
    RunConfig rc;
    rc.echo = doc;
    const Block top(doc, "", {"schema_version", "grid", "frac", "gamma", "task", "seed", "output"});
    if (top.integer("schema_version", kSchemaVersion) != kSchemaVersion)
        throw ConfigError("config: schema_version must be 1");

    const Block grid = top.child("grid", {"L", "N", "omega"});
    rc.grid.L = grid.number("L");
    rc.grid.N = grid.integer("N");
    const auto om = grid.numbers("omega");
    if (om.size() != 2) throw ConfigError("config: grid.omega must be [a, b]");
    rc.grid.omega_lo = om[0];
    rc.grid.omega_hi = om[1];
    if (!(rc.grid.L > 0.0)) throw ConfigError("config: grid.L must be positive");
    if (rc.grid.N < 3) throw ConfigError("config: grid.N must be at least 3");
    if (!(om[0] < om[1]) || !(om[0] > -rc.grid.L) || !(om[1] < rc.grid.L))
        throw ConfigError("config: grid.omega violates omega bounds (need -L < a < b < L)");

    const Block frac = top.child("frac", {"s", "n"});
    rc.s = frac.number("s");
    rc.n = static_cast<int>(frac.integer("n", 1));
    if (!(rc.s >= 0.05 && rc.s <= 0.99)) throw ConfigError("config: frac.s must lie in [0.05, 0.99]");
    if (rc.n != 1) throw ConfigError("config: frac.n must be 1");

    const Block gamma = top.child("gamma", {"profile", "amplitude", "center", "width", "separation", "file"});
    rc.gamma.profile = gamma.string("profile", std::string("constant"));
    rc.gamma.amplitude = gamma.number("amplitude", 0.0);
    rc.gamma.center = gamma.number("center", 0.0);
    rc.gamma.width = gamma.number("width", 1.0);
    rc.gamma.separation = gamma.number("separation", 2.0 * rc.gamma.width);
    rc.gamma.file = gamma.string("file", std::string());
    static const std::set<std::string> profiles = {"constant", "bump", "double-bump", "from-file"};
    if (!profiles.count(rc.gamma.profile))
        throw ConfigError("config: gamma.profile must be one of constant, bump, double-bump, from-file");
    if (rc.gamma.profile == "from-file" && rc.gamma.file.empty())
        throw ConfigError("config: gamma.file is required for profile from-file");
    if (!(rc.gamma.amplitude > -1.0)) throw ConfigError("config: gamma.amplitude must exceed -1");
    if (!(rc.gamma.width > 0.0)) throw ConfigError("config: gamma.width must be positive");

    if (doc.contains("task")) {
        if (!doc.at("task").is_object()) throw ConfigError("config: task must be an object");
        rc.task = doc.at("task");
    }
    if (doc.contains("seed")) {
        const Json& sd = doc.at("seed");
        if (!sd.is_number_unsigned() && !(sd.is_number_integer() && sd.get<std::int64_t>() >= 0))
            throw ConfigError("config: seed must be a non-negative integer");
        rc.seed = sd.get<std::uint64_t>();
    }
    rc.output = top.string("output", std::string("out"));
    return rc;
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

inline Grid make_grid(const RunConfig& rc) {
    return Grid(rc.grid.L, static_cast<Index>(rc.grid.N), rc.grid.omega_lo, rc.grid.omega_hi, rc.n);
}

inline ConductivityProfile make_profile(const GammaConfig& g) {
    if (g.profile == "bump") return ConductivityProfile::bump(g.amplitude, g.center, g.width);
    if (g.profile == "double-bump") return ConductivityProfile::double_bump(g.amplitude, g.center, g.width, g.separation);
    if (g.profile == "from-file") {
        const auto rows = read_two_column_csv(g.file);
        std::vector<double> xs, gs;
        for (const auto& [x, v] : rows) {
            xs.push_back(x);
            gs.push_back(v);
        }
        return ConductivityProfile::tabulated(std::move(xs), std::move(gs));
    }
    return ConductivityProfile::constant();
}

} // namespace fraccond::cli
