#include "CLI11.hpp"

#include "cbrsp/analysis.hpp"
#include "cbrsp/channels.hpp"
#include "cbrsp/noise.hpp"
#include "cbrsp/protocols.hpp"
#include "cbrsp/verify.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cbrsp;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMismatch = 2;

void write_output(const std::string& text, const std::string& outPath) {
    if (outPath.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream out(outPath);
    if (!out)
        throw std::runtime_error("cannot open output file '" + outPath + "'");
    out << text;
}

double parse_double(const std::string& text, const char* what) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != text.size())
        throw std::invalid_argument("bad " + std::string(what) + " '" + text + "'");
    return value;
}

std::vector<double> parse_grid(const std::string& text) {
    // Either a single value or "start:stop:step", endpoints inclusive within
    // half a step (overshoot from rounding is clamped to the stop value).
    const auto first = text.find(':');
    if (first == std::string::npos)
        return {parse_double(text, "grid value")};
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos)
        throw std::invalid_argument("grid must be 'value' or 'start:stop:step'");
    const double start = parse_double(text.substr(0, first), "grid start");
    const double stop = parse_double(text.substr(first + 1, second - first - 1), "grid stop");
    const double step = parse_double(text.substr(second + 1), "grid step");
    if (step <= 0.0)
        throw std::invalid_argument("grid step must be positive");
    std::vector<double> values;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + step / 2)
            break;
        values.push_back(std::min(v, stop));
    }
    return values;
}

protocols::TargetState parse_target(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("target must be 'theta,phi'");
    return protocols::TargetState{parse_double(text.substr(0, comma), "target theta"),
                                  parse_double(text.substr(comma + 1), "target phi")};
}

int force_bit(const std::string& token, const char* kind) {
    const std::string k(kind);
    if (token == k + "0" || (k == "c" && token == "a") || (k == "q" && token == "q1"))
        return 0;
    if (token == k + "1" || (k == "c" && token == "b") || (k == "q" && token == "q2"))
        return 1;
    throw std::invalid_argument("bad forced outcome token '" + token + "'");
}

std::vector<int> parse_forced(const std::string& text, const std::vector<const char*>& kinds) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ','))
        out.push_back(force_bit(token, kinds.at(out.size())));
    if (out.size() != kinds.size())
        throw std::invalid_argument("expected " + std::to_string(kinds.size()) +
                                    " forced outcomes");
    return out;
}

channels::FiveQubitChannelSpec resolve_five_channel(const std::string& name) {
    if (name == "cao-an")
        return channels::cao_an_preset();
    if (name == "noise-study")
        return channels::noise_study_preset();
    return channels::parse_five_qubit_spec(name);
}

std::string transcripts_to_json(const std::vector<protocols::ProtocolTranscript>& transcripts) {
    if (transcripts.size() == 1)
        return transcripts.front().to_json_string();
    std::string out = "[\n";
    for (std::size_t i = 0; i < transcripts.size(); ++i) {
        out += transcripts[i].to_json_string();
        if (i + 1 < transcripts.size())
            out += ",";
        out += "\n";
    }
    out += "]";
    return out;
}

struct RunOptions {
    std::string protocol;
    std::string channel;
    std::string t1, t2;
    std::string force;
    std::uint64_t seed = 0;
    bool seedGiven = false;
    bool enumerateAll = false;
    int ancilla = 0;
    std::string out;
};

int do_run(const RunOptions& opt) {
    const auto t1 = parse_target(opt.t1);
    const auto t2 = parse_target(opt.t2);

    protocols::OutcomePolicy policy = protocols::OutcomePolicy::make_sampled(opt.seed);
    const bool probabilistic = opt.protocol == "prob";
    if (!opt.force.empty()) {
        const std::vector<const char*> kinds =
            probabilistic ? std::vector<const char*>{"q", "q", "c"}
                          : std::vector<const char*>{"u", "v", "u", "v", "c"};
        policy = protocols::OutcomePolicy::make_forced(parse_forced(opt.force, kinds));
    } else if (opt.enumerateAll) {
        policy = protocols::OutcomePolicy::enumerate_all();
    }

    std::vector<protocols::ProtocolTranscript> transcripts;
    if (opt.protocol == "joint") {
        channels::SevenQubitChannelSpec spec = [&] {
            try {
                return channels::parse_seven_qubit_spec(opt.channel);
            } catch (const std::invalid_argument&) {
                return channels::seven_from_five(resolve_five_channel(opt.channel), opt.ancilla);
            }
        }();
        transcripts = protocols::run_cjbrsp(spec, t1, t2, protocols::KnowledgeSplit{}, policy);
    } else {
        const auto spec = resolve_five_channel(opt.channel);
        transcripts = probabilistic
                          ? protocols::run_probabilistic_cbrsp(spec, t1, t2, policy)
                          : protocols::run_deterministic_cbrsp(spec, t1, t2, policy);
    }
    write_output(transcripts_to_json(transcripts), opt.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Controlled bidirectional remote state preparation simulator"};
    app.require_subcommand(1);

    // enumerate-channels
    std::string family = "five", charlieToken = "comp", enumOut;
    auto* enumCmd = app.add_subcommand("enumerate-channels", "List valid channel specs");
    enumCmd->add_option("--family", family, "five|seven-low|seven-high")
        ->check(CLI::IsMember({"five", "seven-low", "seven-high"}));
    enumCmd->add_option("--charlie", charlieToken, "controller basis: comp|pm|angles(a,b)");
    enumCmd->add_option("--out", enumOut, "output file (default stdout)");

    // run
    RunOptions runOpt;
    auto* runCmd = app.add_subcommand("run", "Run a protocol and print the transcript");
    runCmd->add_option("protocol", runOpt.protocol, "prob|det|joint")
        ->required()
        ->check(CLI::IsMember({"prob", "det", "joint"}));
    runCmd->add_option("--channel", runOpt.channel, "preset (cao-an|noise-study) or spec string")
        ->required();
    runCmd->add_option("--t1", runOpt.t1, "A->B target 'theta,phi'")->required();
    runCmd->add_option("--t2", runOpt.t2, "B->A target 'theta,phi'")->required();
    runCmd->add_option("--force", runOpt.force,
                       "forced outcomes, e.g. q2,q2,a or u0,v1,u1,v0,b");
    runCmd->add_option("--seed", runOpt.seed, "sampling seed (default 0)");
    runCmd->add_flag("--enumerate", runOpt.enumerateAll, "enumerate every branch");
    runCmd->add_option("--ancilla", runOpt.ancilla, "ancilla bit when deriving joint channels")
        ->check(CLI::Range(0, 1));
    runCmd->add_option("--out", runOpt.out, "output file (default stdout)");

    // sweep
    std::string noiseToken = "both", etaGrid, th1Grid, th2Grid;
    std::string ph1Grid = "0", ph2Grid = "0", format = "csv", sweepOut, reportOut;
    auto* sweepCmd = app.add_subcommand("sweep", "Fidelity sweep over a parameter grid");
    sweepCmd->add_option("--noise", noiseToken, "ad|pd|both")
        ->check(CLI::IsMember({"ad", "pd", "both"}));
    sweepCmd->add_option("--eta", etaGrid, "value or start:stop:step")->required();
    sweepCmd->add_option("--theta1", th1Grid, "value or start:stop:step")->required();
    sweepCmd->add_option("--theta2", th2Grid, "value or start:stop:step")->required();
    sweepCmd->add_option("--phi1", ph1Grid, "value or start:stop:step (default 0)");
    sweepCmd->add_option("--phi2", ph2Grid, "value or start:stop:step (default 0)");
    sweepCmd->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    sweepCmd->add_option("--out", sweepOut, "output file (default stdout)");
    sweepCmd->add_option("--report", reportOut, "also write the comparison report JSON here");

    // verify
    std::string suite = "all", reportDir;
    auto* verifyCmd = app.add_subcommand("verify", "Run a named verification suite");
    verifyCmd->add_option("--suite", suite, "enumeration|tables|cptp|closedform|all")
        ->check(CLI::IsMember({"enumeration", "tables", "cptp", "closedform", "all"}));
    verifyCmd->add_option("--report-dir", reportDir,
                          "directory for emitted mismatch reports (default: current dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*enumCmd) {
            const auto charlie = channels::charlie_from_string(charlieToken);
            std::string text;
            if (family == "five") {
                const auto specs = channels::enumerate_five_qubit_specs(charlie);
                text = "count=" + std::to_string(specs.size()) + "\n";
                for (const auto& s : specs)
                    text += channels::to_string(s) + "\n";
            } else {
                const auto fam = family == "seven-low" ? channels::GhzFamily::LowAncilla
                                                       : channels::GhzFamily::HighAncilla;
                const auto specs = channels::enumerate_seven_qubit_specs(fam, charlie);
                text = "count=" + std::to_string(specs.size()) + "\n";
                for (const auto& s : specs)
                    text += channels::to_string(s) + "\n";
            }
            write_output(text, enumOut);
            return kExitOk;
        }

        if (*runCmd)
            return do_run(runOpt);

        if (*sweepCmd) {
            analysis::SweepGrid grid;
            if (noiseToken == "ad" || noiseToken == "both")
                grid.models.push_back(noise::NoiseModel::AmplitudeDamping);
            if (noiseToken == "pd" || noiseToken == "both")
                grid.models.push_back(noise::NoiseModel::PhaseDamping);
            grid.etas = parse_grid(etaGrid);
            grid.theta1s = parse_grid(th1Grid);
            grid.theta2s = parse_grid(th2Grid);
            grid.phi1s = parse_grid(ph1Grid);
            grid.phi2s = parse_grid(ph2Grid);
            const auto records = analysis::sweep(grid);
            if (format == "csv") {
                std::ostringstream oss;
                analysis::write_csv(oss, records);
                write_output(oss.str(), sweepOut);
            } else {
                write_output(analysis::records_to_json_string(records), sweepOut);
            }
            if (!reportOut.empty())
                write_output(analysis::report_to_json_string(analysis::compare_report(records)),
                             reportOut);
            return kExitOk;
        }

        if (*verifyCmd) {
            const auto results = verify::run_suite(suite);
            bool allPass = true;
            for (const auto& r : results) {
                std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                            r.detail.c_str());
                allPass = allPass && r.pass;
                if (!r.report_json.empty()) {
                    std::string slug = r.name;
                    for (char& c : slug)
                        if (c == ' ' || c == '-')
                            c = '_';
                    const std::string path =
                        (reportDir.empty() ? std::string(".") : reportDir) + "/verify_" + slug +
                        "_report.json";
                    write_output(r.report_json, path);
                    std::printf("       report: %s\n", path.c_str());
                }
            }
            return allPass ? kExitOk : kExitMismatch;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
