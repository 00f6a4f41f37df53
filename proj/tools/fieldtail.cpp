// fieldtail: tail probabilities for the maximum of a score random field.
//
//   fieldtail approx   --config run.json [--mode both] [--csv out.csv] [--json out.json]
//   fieldtail simulate --config run.json [--seed N] [--threads N]
//   fieldtail compare  --config run.json [--sim simulate.csv]
//   fieldtail verify
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error,
// 3 numerical error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fieldtail/commands.hpp"

namespace {

using namespace fieldtail;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct Options {
    std::string config;
    std::string csv;
    std::string json;
    std::string sim;
    std::string mode = "both";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool inject_fault = false;
};

unsigned resolve_threads(const Options& o, const RunConfig* cfg) {
    if (o.threads) return std::max(1u, *o.threads);
    if (const char* env = std::getenv("FIELDTAIL_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("FIELDTAIL_THREADS must be a positive integer, got '") + env + "'");
    }
    if (cfg && cfg->threads > 0) return cfg->threads;
    return 1;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

void emit(const Report& report, const Options& o, const std::string& text_path) {
    if (!o.csv.empty()) write_file(o.csv, to_csv(report));
    if (!o.json.empty()) write_file(o.json, to_json(report).dump(2) + "\n");
    if (text_path.empty()) {
        write_text(std::cout, report);
    } else {
        std::ofstream out(text_path);
        if (!out) throw ConfigError("cannot open '" + text_path + "' for writing");
        write_text(out, report);
    }
}

RunConfig load_config(const Options& o) {
    RunConfig cfg = RunConfig::load(o.config);
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

int run(const std::string& command, const Options& o) {
    if (command == "verify") {
        if (o.inject_fault) set_lambda_fault_for_testing(true);
        const auto checks = run_verify();
        emit(verify_report(checks), o, "");
        for (const auto& c : checks)
            if (!c.passed) return kVerifyFailed;
        return kOk;
    }
    const RunConfig cfg = load_config(o);
    const unsigned threads = resolve_threads(o, &cfg);
    if (command == "approx") {
        emit(approx_report(cfg, parse_output_mode(o.mode), threads), o, cfg.output);
    } else if (command == "simulate") {
        if (cfg.iterations < 1) throw ConfigError("simulate needs iterations >= 1");
        const SimResult res = estimate_pvalues(cfg.context(), cfg.sim_config(threads));
        // Timing stays off the reports so they are byte-identical across runs.
        std::cerr << "simulate: " << res.iterations << " iterations in " << res.seconds << " s on " << threads
                  << " thread(s), seed " << cfg.seed << "\n";
        emit(simulate_report(cfg, res), o, cfg.output);
    } else if (command == "compare") {
        std::optional<Report> sim;
        if (!o.sim.empty()) {
            std::ifstream in(o.sim, std::ios::binary);
            if (!in) throw ConfigError("cannot open simulation file '" + o.sim + "'");
            try {
                sim = parse_csv(in);
            } catch (const std::runtime_error& e) {
                throw ConfigError("simulation file '" + o.sim + "': " + e.what());
            }
        }
        emit(compare_report(cfg, threads, sim), o, cfg.output);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tail probabilities for the maximum of a score random field"};
    app.require_subcommand(1, 1);
    Options o;

    auto add_outputs = [&](CLI::App* sub) {
        sub->add_option("--csv", o.csv, "Write the report as CSV");
        sub->add_option("--json", o.json, "Write the report as JSON");
    };
    auto add_run = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration")->required();
        sub->add_option("--seed", o.seed, "Override the config seed");
        sub->add_option("--threads", o.threads, "Worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        add_outputs(sub);
    };

    CLI::App* approx = app.add_subcommand("approx", "Analytic approximation p_E and Gaussian variant p_G");
    add_run(approx);
    approx->add_option("--mode", o.mode, "Columns to report")->check(CLI::IsMember({"full", "gaussian", "both"}));
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo exceedance frequencies");
    add_run(simulate);
    CLI::App* compare = app.add_subcommand("compare", "Approximation next to simulation");
    add_run(compare);
    compare->add_option("--sim", o.sim, "Reuse a CSV written by 'simulate --csv'");
    CLI::App* verify = app.add_subcommand("verify", "Run the invariant suite");
    add_outputs(verify);
    verify->add_flag("--inject-lambda-fault", o.inject_fault, "Testing aid: corrupt Lambda to show the suite fails")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const DegeneracyError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::runtime_error& e) {
        // I/O and malformed input files.
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kNumerical;
    }
}
