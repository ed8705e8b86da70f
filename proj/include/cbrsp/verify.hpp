#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Self-verification checks exposed through the CLI `verify` subcommand and
// run as the acceptance suite. Each check prints one pass/fail line; checks
// that compare against closed-form expressions emit a JSON mismatch report
// for any out-of-tolerance point instead of accepting it silently.

namespace cbrsp::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    std::string report_json; // non-empty when the check emits a report
};

CheckResult check_channel_enumeration();
CheckResult check_noiseless_protocols(std::uint64_t seed = 20240901);
CheckResult check_kraus_completeness();
CheckResult check_closed_form_fidelity();
CheckResult check_fidelity_curve_shape();
CheckResult check_phase_independence();
CheckResult check_noise_trace_structure();
CheckResult check_closed_form_states();

/// Suites: "enumeration", "tables", "cptp", "closedform", "all".
std::vector<CheckResult> run_suite(const std::string& suite);

} // namespace cbrsp::verify
