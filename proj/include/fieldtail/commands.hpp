#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fieldtail/report.hpp"
#include "fieldtail/run_config.hpp"
#include "fieldtail/simulator.hpp"
#include "fieldtail/verify.hpp"

namespace fieldtail {

enum class OutputMode { full, gaussian, both };

OutputMode parse_output_mode(const std::string& name);

/// Provenance block: tool version, command, config hash and seed.
nlohmann::json provenance(const RunConfig& config, const std::string& command);

Report approx_report(const RunConfig& config, OutputMode mode, unsigned threads);
Report simulate_report(const RunConfig& config, const SimResult& result);
/// Joins an approximation with a simulation (run here unless `simulation` is
/// given). With iterations == 0 or an empty simulation the report carries the
/// approximation only, plus a notice.
Report compare_report(const RunConfig& config, unsigned threads, const std::optional<Report>& simulation = {});
Report verify_report(const std::vector<CheckResult>& checks);

}  // namespace fieldtail
