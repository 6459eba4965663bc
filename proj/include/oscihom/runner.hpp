#pragma once

#include <cstdint>
#include <set>
#include <string>

#include <json.hpp>

#include "oscihom/geometry.hpp"

namespace oscihom {

struct RunConfig {
    std::string command;    // classify|average|triple|sweep|bounds|sandwich|
                            // dirichlet|neumann|examples
    std::string config_path; // empty only for `examples`
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;
    bool strict = false; // Undetermined classifications become hard errors
    std::int64_t node_cap = 100000000;
};

// Executes the command, writes result.json (and result.csv / *.dat where a
// sweep table exists) into out_dir. Returns the process exit status:
// 0 = pass, 2 = verdict failure, 1 = error (also used for exceptions
// raised before this returns).
int run(const RunConfig& cfg);

// strict JSON object access: every key must be consumed
class StrictObject {
public:
    explicit StrictObject(const nlohmann::json& j, const std::string& where);

    bool has(const std::string& key);
    const nlohmann::json& at(const std::string& key);
    double num(const std::string& key);
    double num_or(const std::string& key, double fallback);
    long long integer_or(const std::string& key, long long fallback);
    std::string str(const std::string& key);
    std::string str_or(const std::string& key, const std::string& fallback);

    void finish(); // throws ParseError on unconsumed keys

private:
    const nlohmann::json* j_;
    std::string where_;
    std::set<std::string> seen_;
};

Curve curve_from_json(const nlohmann::json& j);

// serialize with doubles at 17 significant digits (deterministic output)
std::string dump_json17(const nlohmann::json& j);

} // namespace oscihom
