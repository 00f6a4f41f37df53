#include "fieldtail/commands.hpp"

#include <cmath>
#include <stdexcept>

namespace fieldtail {

OutputMode parse_output_mode(const std::string& name) {
    if (name == "full") return OutputMode::full;
    if (name == "gaussian") return OutputMode::gaussian;
    if (name == "both") return OutputMode::both;
    throw std::invalid_argument("mode must be full, gaussian or both");
}

nlohmann::json provenance(const RunConfig& config, const std::string& command) {
    nlohmann::json cfg = config.to_json();
    cfg.erase("threads");
    return {{"tool", "fieldtail"},   {"version", kVersion},       {"command", command},
            {"config_hash", config.hash()}, {"seed", config.seed}, {"config", cfg}};
}

Report approx_report(const RunConfig& config, OutputMode mode, unsigned threads) {
    const FieldContext ctx = config.context();
    const auto results = tail_approx(ctx, RegionSpec::unit_square(), config.thresholds, config.approx_options(threads));
    Report r;
    r.header = provenance(config, "approx");
    r.header["n"] = ctx.size();
    const bool full = mode != OutputMode::gaussian;
    const bool gauss = mode != OutputMode::full;
    r.columns = {"x"};
    if (full) r.columns.insert(r.columns.end(), {"p_E", "interior", "boundary"});
    if (gauss) r.columns.insert(r.columns.end(), {"p_G", "interior_gaussian", "boundary_gaussian"});
    r.columns.insert(r.columns.end(), {"quad_error", "interior_panels", "boundary_panels", "evaluations",
                                       "validity_warning", "range_warning"});
    bool any_validity = false;
    for (const auto& a : results) {
        std::vector<std::string> row = {format_number(a.x)};
        if (full) row.insert(row.end(), {format_number(a.p_E), format_number(a.interior), format_number(a.boundary)});
        if (gauss)
            row.insert(row.end(), {format_number(a.p_G), format_number(a.interior_gaussian),
                                   format_number(a.boundary_gaussian)});
        row.insert(row.end(), {format_number(a.p_E_error), format_number(static_cast<std::size_t>(a.interior_panels)),
                               format_number(static_cast<std::size_t>(a.boundary_panels)), format_number(a.evaluations),
                               format_bool(a.validity_warning), format_bool(a.range_warning)});
        r.add_row(std::move(row));
        any_validity = any_validity || a.validity_warning;
        if (a.range_warning)
            r.notices.push_back("x = " + format_number(a.x) + ": approximation left [0, 1] (not clamped)");
    }
    if (any_validity)
        r.notices.push_back("some thresholds have x^4 >= n = " + std::to_string(ctx.size()) +
                            "; the expansion needs x = o(n^{1/4})");
    return r;
}

Report simulate_report(const RunConfig& config, const SimResult& res) {
    Report r;
    r.header = provenance(config, "simulate");
    r.header["coarse_grid"] = config.sim_config(1).coarse_resolution();
    r.columns = {"x", "p_hat", "se", "count", "N", "grid_p_hat", "grid_se", "grid_count"};
    for (std::size_t i = 0; i < res.thresholds.size(); ++i)
        r.add_row({format_number(res.thresholds[i]), format_number(res.p_hat(i)), format_number(res.se(i)),
                   format_number(res.counts[i]), format_number(res.iterations), format_number(res.grid_p_hat(i)),
                   format_number(res.grid_se(i)), format_number(res.grid_counts[i])});
    if (res.nonconverged > 0)
        r.notices.push_back(std::to_string(res.nonconverged) +
                            " iterations had an ascent start that hit the step limit (best iterate kept)");
    return r;
}

Report compare_report(const RunConfig& config, unsigned threads, const std::optional<Report>& simulation) {
    const Report approx = approx_report(config, OutputMode::both, threads);
    std::optional<Report> sim = simulation;
    if (!sim && config.iterations > 0) sim = simulate_report(config, estimate_pvalues(config.context(), config.sim_config(threads)));

    Report r;
    r.header = provenance(config, "compare");
    const bool have_sim = sim && !sim->rows.empty();
    if (have_sim) {
        r.columns = {"x", "p_hat", "se", "p_E", "p_G", "agree_E", "agree_G", "grid_p_hat"};
    } else {
        r.columns = {"x", "p_E", "p_G"};
        r.notices.push_back("no simulation results; approximation only");
    }
    for (std::size_t i = 0; i < approx.rows.size(); ++i) {
        const double x = approx.number(i, "x");
        const double pe = approx.number(i, "p_E");
        const double pg = approx.number(i, "p_G");
        if (!have_sim) {
            r.add_row({format_number(x), format_number(pe), format_number(pg)});
            continue;
        }
        std::size_t j = 0;
        while (j < sim->rows.size() && sim->number(j, "x") != x) ++j;
        if (j == sim->rows.size()) throw std::runtime_error("simulation has no row for x = " + format_number(x));
        const double p = sim->number(j, "p_hat");
        const double se = sim->number(j, "se");
        r.add_row({format_number(x), format_number(p), format_number(se), format_number(pe), format_number(pg),
                   format_bool(std::abs(p - pe) <= 3.0 * se), format_bool(std::abs(p - pg) <= 3.0 * se),
                   format_number(sim->number(j, "grid_p_hat"))});
    }
    r.notices.insert(r.notices.end(), approx.notices.begin(), approx.notices.end());
    return r;
}

Report verify_report(const std::vector<CheckResult>& checks) {
    Report r;
    r.header = {{"tool", "fieldtail"}, {"version", kVersion}, {"command", "verify"}};
    r.columns = {"check", "result", "measured", "tolerance", "detail"};
    for (const auto& c : checks)
        r.add_row({c.name, c.passed ? "PASS" : "FAIL", format_number(c.measured), format_number(c.tolerance), c.detail});
    return r;
}

}  // namespace fieldtail
