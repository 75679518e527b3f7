#pragma once

// Run configuration: a small strict TOML subset (scalars, arrays of
// integers, the [model.params] and [payoff.params] tables). Unknown keys
// are rejected by name; parse -> serialize -> parse is a fixpoint.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string model = "constant";
    std::map<std::string, double> model_params;
    std::string payoff = "expm";
    std::map<std::string, double> payoff_params;
    double L = 0.0;
    double x0 = 0.5;
    double T = 1.0;
    int n = 256;
    std::uint64_t paths = 100000;
    std::uint64_t seed = 0;
    std::string estimator = "all";        // value|reflected|mixed|bel|fd|all
    int engine = 0;                       // 0 = estimator default
    std::string backend = "direct";       // direct|importance
    std::string oracle = "analytic";      // analytic|pde|none
    std::string survival = "conditional"; // bernoulli|conditional|discrete
    double fd_h = 0.0;                    // 0 = default step
    unsigned threads = 0;                 // 0 = hardware
    bool strict = false;
    std::string out_dir = "out";
    std::vector<int> sweep_n = {64, 128, 256, 512};
    int pde_nx = 4000;
    int pde_nt = 2000;

    std::set<std::string> keys_set;  // keys present in the parsed source

    bool was_set(const std::string& k) const { return keys_set.count(k) > 0; }
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Canonical TOML rendering; parse(serialize(c)) == c field-wise.
std::string serialize_config(const RunConfig& c);

/// Field-level validation (registry ids, domain constraints, sweep order).
/// Throws ConfigError with the offending key.
void validate_config(const RunConfig& c);

/// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const RunConfig& c);

} // namespace ksd
