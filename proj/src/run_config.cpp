#include "fieldtail/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fieldtail/report.hpp"

namespace fieldtail {

namespace {

const std::set<std::string> kKeys = {"m",      "D",          "p0",   "thresholds", "iterations",  "seed",
                                     "quad_tol", "output",   "convention", "family", "tilt", "coarse_grid",
                                     "sups_output", "threads"};

template <class T>
T get(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

void require_integer(const nlohmann::json& j, const char* key, bool non_negative) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    const bool ok = v.is_number_integer() && (!non_negative || v.is_number_unsigned() || v.get<std::int64_t>() >= 0);
    if (!ok) throw ConfigError(std::string("config key '") + key + "' must be a" + (non_negative ? " non-negative" : "n") + " integer");
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    require_integer(j, "m", false);
    require_integer(j, "iterations", true);
    require_integer(j, "seed", true);
    require_integer(j, "coarse_grid", true);
    require_integer(j, "threads", true);
    for (const char* key : {"D", "p0", "quad_tol"})
        if (j.contains(key) && !j.at(key).is_number())
            throw ConfigError(std::string("config key '") + key + "' must be a number");
    if (j.contains("thresholds")) {
        const auto& t = j.at("thresholds");
        if (!t.is_array()) throw ConfigError("config key 'thresholds' must be an array of numbers");
        for (const auto& x : t)
            if (!x.is_number()) throw ConfigError("config key 'thresholds' must be an array of numbers");
    }
    RunConfig c;
    c.m = get(j, "m", c.m);
    c.D = get(j, "D", c.D);
    c.p0 = get(j, "p0", c.p0);
    c.thresholds = get(j, "thresholds", c.thresholds);
    c.iterations = get(j, "iterations", c.iterations);
    c.seed = get(j, "seed", c.seed);
    c.quad_tol = get(j, "quad_tol", c.quad_tol);
    c.output = get(j, "output", c.output);
    c.convention = get(j, "convention", c.convention);
    c.family = get(j, "family", c.family);
    c.tilt = get(j, "tilt", c.tilt);
    c.coarse_grid = get(j, "coarse_grid", c.coarse_grid);
    c.sups_output = get(j, "sups_output", c.sups_output);
    c.threads = get(j, "threads", c.threads);
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    return {{"m", m},
            {"D", D},
            {"p0", p0},
            {"thresholds", thresholds},
            {"iterations", iterations},
            {"seed", seed},
            {"quad_tol", quad_tol},
            {"output", output},
            {"convention", convention},
            {"family", family},
            {"tilt", tilt},
            {"coarse_grid", coarse_grid},
            {"sups_output", sups_output},
            {"threads", threads}};
}

std::string RunConfig::hash() const {
    // Thread count and output paths do not affect results.
    nlohmann::json j = to_json();
    j.erase("threads");
    j.erase("output");
    j.erase("sups_output");
    return fnv1a_hex(j.dump());
}

void RunConfig::validate() const {
    if (m < 0 || m > 12) throw ConfigError("m must lie in [0, 12]");
    if (!(D > 0.0) || !std::isfinite(D)) throw ConfigError("D must be positive and finite");
    if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0, 1)");
    if (thresholds.empty()) throw ConfigError("thresholds must not be empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0)) throw ConfigError("thresholds must be positive");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1])) throw ConfigError("thresholds must be strictly ascending");
    }
    if (!(quad_tol > 0.0 && quad_tol < 1.0)) throw ConfigError("quad_tol must lie in (0, 1)");
    if (family != "bernoulli" && family != "gaussian") throw ConfigError("family must be 'bernoulli' or 'gaussian'");
    if (coarse_grid == 1) throw ConfigError("coarse_grid must be at least 2 (0 selects the default)");
    try {
        parse_conventions(convention);
        parse_tilt_convention(tilt);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ModelConventions RunConfig::conventions() const { return parse_conventions(convention); }

FamilySpec RunConfig::family_spec() const {
    if (family == "gaussian") return FamilySpec::standard_gaussian();
    return FamilySpec::standardized_bernoulli(p0, parse_tilt_convention(tilt));
}

double RunConfig::kernel_D() const { return D * conventions().kernel_factor; }

FieldContext RunConfig::context() const { return FieldContext(Grid(m), family_spec(), kernel_D()); }

ApproxOptions RunConfig::approx_options(unsigned n_threads) const {
    QuadratureOptions q;
    q.rel_tol = quad_tol;
    q.threads = n_threads;
    return ApproxOptions::from(conventions(), q);
}

SimConfig RunConfig::sim_config(unsigned n_threads) const {
    SimConfig s;
    s.m = m;
    s.D = kernel_D();
    s.p0 = p0;
    s.gaussian = family == "gaussian";
    s.thresholds = thresholds;
    s.iterations = iterations;
    s.seed = seed;
    s.coarse_grid = coarse_grid;
    s.threads = n_threads;
    s.sups_output = sups_output;
    return s;
}

}  // namespace fieldtail
