#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldtail/approximation.hpp"
#include "fieldtail/conventions.hpp"
#include "fieldtail/expfam.hpp"
#include "fieldtail/simulator.hpp"

namespace fieldtail {

/// Invalid or unreadable configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters shared by every command, read from a JSON object.
struct RunConfig {
    int m = 5;
    double D = 10.0;
    double p0 = 0.1;
    std::vector<double> thresholds;
    /// 0 is allowed and means "no simulation" (compare reports the approximation only).
    std::size_t iterations = 5000;
    std::uint64_t seed = 1;
    double quad_tol = 1e-4;
    /// Text report destination; empty means stdout.
    std::string output;
    std::string convention = "reference";
    /// "bernoulli" or "gaussian".
    std::string family = "bernoulli";
    std::string tilt = "standardized";
    int coarse_grid = 0;
    std::string sups_output;
    /// 0 defers to --threads / FIELDTAIL_THREADS.
    unsigned threads = 0;

    /// Rejects unknown keys and invalid values with ConfigError.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
    nlohmann::json to_json() const;
    /// FNV-1a of the canonical JSON dump.
    std::string hash() const;
    void validate() const;

    ModelConventions conventions() const;
    FamilySpec family_spec() const;
    /// D scaled by the convention's kernel factor.
    double kernel_D() const;
    FieldContext context() const;
    ApproxOptions approx_options(unsigned threads) const;
    SimConfig sim_config(unsigned threads) const;
};

}  // namespace fieldtail
