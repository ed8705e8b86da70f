#include "cbrsp/analysis.hpp"

#include "cbrsp/parallel.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace cbrsp::analysis {

using channels::BellKind;
using protocols::table1_correction;
using qmath::cplx;

NoisyRunResult noisy_probabilistic_fidelity(const NoisyRunConfig& config) {
    config.channel.validate();
    if (config.controllerOutcome != 0 && config.controllerOutcome != 1)
        throw std::invalid_argument("controller outcome must be 0 or 1");

    const StateVector channel = channels::make_five_qubit_channel(config.channel);
    DensityMatrix rho = DensityMatrix::pure(channel);
    rho = noise::apply_grouped_noise(rho, noise::make_kraus(config.model, config.eta),
                                     noise::NoiseGrouping::travel_default());

    // Project onto (q2, q2, controller outcome) on (S1, S2, C1).
    const auto q2a = protocols::rsp_basis(config.targetAtoB).projector(1);
    const auto q2b = protocols::rsp_basis(config.targetBtoA).projector(1);
    const auto pc = config.channel.charlie.basis().projector(config.controllerOutcome);
    const std::size_t s1[] = {0}, s2[] = {2}, c1[] = {4};
    DensityMatrix selected = qmath::apply_on_qubits(rho, q2a, s1);
    selected = qmath::apply_on_qubits(selected, q2b, s2);
    selected = qmath::apply_on_qubits(selected, pc, c1);

    const double selectionProbability = selected.trace_real();
    if (selectionProbability < qmath::tol::kOutcomeFloor)
        throw std::domain_error("post-selected outcomes have vanishing probability");

    const std::size_t keep[] = {1, 3}; // (R1, R2)
    DensityMatrix out = qmath::partial_trace(selected.normalized_copy(), keep);

    // Receiver corrections for the post-selected branch's revealed pairs.
    const BellKind pairAtoB =
        config.controllerOutcome == 0 ? config.channel.psi1 : config.channel.psi3;
    const BellKind pairBtoA =
        config.controllerOutcome == 0 ? config.channel.psi2 : config.channel.psi4;
    const std::size_t r1[] = {0}, r2[] = {1};
    out = qmath::apply_on_qubits(out, protocols::correction_matrix(table1_correction(pairAtoB)),
                                 r1);
    out = qmath::apply_on_qubits(out, protocols::correction_matrix(table1_correction(pairBtoA)),
                                 r2);

    const double fidelity =
        qmath::fidelity_pure_vs_mixed(joint_target(config.targetAtoB, config.targetBtoA), out);
    return NoisyRunResult{std::move(out), fidelity, selectionProbability};
}

StateVector joint_target(const TargetState& t1, const TargetState& t2) {
    return tensor_product(t1.ket(), t2.ket());
}

double closed_form_F_AD(double th1, double th2, double e) {
    const double num = 64 - 128 * e + 66 * e * e - 2 * e * e * std::cos(4 * th1) +
                       e * e * std::cos(4 * (th1 - th2)) - 2 * e * e * std::cos(4 * th2) +
                       e * e * std::cos(4 * (th1 + th2));
    const double den = 16 * (4 - 8 * e + 6 * e * e + 2 * e * e * std::cos(2 * th1) +
                             e * e * std::cos(2 * (th1 - th2)) + 2 * e * e * std::cos(2 * th2) +
                             e * e * std::cos(2 * (th1 + th2)));
    return num / den;
}

double closed_form_F_PD(double th1, double th2, double e) {
    const double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
    const double mix = 2 - 4 * e + 3 * e2;
    return (1.0 / 64.0) *
           (64 - 256 * e + 420 * e2 - 328 * e3 + 118 * e4 +
            6 * e2 * mix * std::cos(4 * th1) - 16 * e2 * mix * std::cos(2 * (th1 - th2)) +
            (2 * e2 - 4 * e3 + 3 * e4) * std::cos(4 * (th1 - th2)) +
            (12 * e2 - 24 * e3 + 18 * e4) * std::cos(4 * th2) +
            (-32 * e2 + 64 * e3 - 48 * e4) * std::cos(2 * (th1 + th2)) +
            (2 * e2 - 4 * e3 + 3 * e4) * std::cos(4 * (th1 + th2)));
}

DensityMatrix closed_form_rho_out(NoiseModel model, double th1, double th2, double ph1,
                                  double ph2, double e) {
    const double s1 = std::sin(th1), c1 = std::cos(th1);
    const double s2 = std::sin(th2), c2 = std::cos(th2);
    const double s2t1 = std::sin(2 * th1), s2t2 = std::sin(2 * th2);
    const cplx ep1 = std::polar(1.0, ph1), ep2 = std::polar(1.0, ph2);
    const cplx ep12 = std::polar(1.0, ph1 + ph2), epd = std::polar(1.0, ph1 - ph2);
    ComplexMatrix m(4, 4);

    if (model == NoiseModel::AmplitudeDamping) {
        const double denom =
            2 * (4 - 8 * e + 6 * e * e + 2 * e * e * std::cos(2 * th1) +
                 e * e * std::cos(2 * (th1 - th2)) + 2 * e * e * std::cos(2 * th2) +
                 e * e * std::cos(2 * (th1 + th2)));
        const double na = (1 - e) * (1 - e) / denom;
        // The (1,1) entry carries a 1/(1-e)^2 that cancels the prefactor;
        // written with the cancellation done so eta = 1 stays finite.
        const double rho11 =
            (2 - 4 * e + 6 * e * e + 2 * (-1 + 2 * e + e * e) * std::cos(2 * th1) +
             (1 - 2 * e + 3 * e * e) * std::cos(2 * (th1 - th2)) - 2 * std::cos(2 * th2) +
             4 * e * std::cos(2 * th2) + 2 * e * e * std::cos(2 * th2) +
             std::cos(2 * (th1 + th2)) - 2 * e * std::cos(2 * (th1 + th2)) +
             3 * e * e * std::cos(2 * (th1 + th2)));
        m.at(0, 0) = rho11 / denom;
        m.at(0, 1) = na * 4.0 * s1 * s1 * s2t2 * std::conj(ep2);
        m.at(0, 2) = na * 4.0 * s2t1 * s2 * s2 * std::conj(ep1);
        m.at(0, 3) = na * 2.0 * s2t1 * s2t2 * std::conj(ep12);
        m.at(1, 1) = na * 8.0 * c2 * c2 * s1 * s1;
        m.at(1, 2) = na * 2.0 * s2t1 * s2t2 * std::conj(epd);
        m.at(1, 3) = na * 4.0 * c2 * c2 * s2t1 * std::conj(ep1);
        m.at(2, 2) = na * 8.0 * c1 * c1 * s2 * s2;
        m.at(2, 3) = na * 4.0 * c1 * c1 * s2t2 * std::conj(ep2);
        m.at(3, 3) = na * 8.0 * c1 * c1 * c2 * c2;
    } else {
        const double pre = std::pow(1 - e, 4) / 4.0;
        const double diag = (1 - 2 * e + 2 * e * e) * (1 - 2 * e + 2 * e * e);
        m.at(0, 0) = pre * 4.0 * s1 * s1 * s2 * s2;
        m.at(0, 1) = pre * 2.0 * s1 * s1 * s2t2 * std::conj(ep2);
        m.at(0, 2) = pre * 2.0 * s2t1 * s2 * s2 * std::conj(ep1);
        m.at(0, 3) = pre * s2t1 * s2t2 * std::conj(ep12);
        m.at(1, 1) = diag * c2 * c2 * s1 * s1; // 4 mix^2/(1-e)^4 entry, cancelled
        m.at(1, 2) = pre * s2t1 * s2t2 * std::conj(epd);
        m.at(1, 3) = pre * 2.0 * c2 * c2 * s2t1 * std::conj(ep1);
        m.at(2, 2) = diag * c1 * c1 * s2 * s2;
        m.at(2, 3) = pre * 2.0 * c1 * c1 * s2t2 * std::conj(ep2);
        m.at(3, 3) = pre * 4.0 * c1 * c1 * c2 * c2;
    }
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < r; ++c)
            m.at(r, c) = std::conj(m.at(c, r));
    return DensityMatrix::from_matrix(2, std::move(m));
}

SweepGrid SweepGrid::verification_grid() {
    SweepGrid g;
    g.models = {NoiseModel::AmplitudeDamping, NoiseModel::PhaseDamping};
    for (int i = 0; i <= 20; ++i)
        g.etas.push_back(i * 0.05);
    g.theta1s = {M_PI / 8, M_PI / 4, 3 * M_PI / 8};
    g.theta2s = g.theta1s;
    g.phi1s = {0.0, M_PI / 3};
    g.phi2s = g.phi1s;
    return g;
}

std::size_t SweepGrid::size() const {
    return models.size() * etas.size() * theta1s.size() * theta2s.size() * phi1s.size() *
           phi2s.size();
}

std::vector<FidelityRecord> sweep(const SweepGrid& grid) {
    if (grid.size() == 0)
        throw std::invalid_argument("sweep grid is empty");
    const std::size_t total = grid.size();
    std::vector<FidelityRecord> records(total);

    const auto evaluate = [&grid, &records](std::size_t flat) {
        std::size_t rest = flat;
        const std::size_t i2 = rest % grid.phi2s.size();
        rest /= grid.phi2s.size();
        const std::size_t i1 = rest % grid.phi1s.size();
        rest /= grid.phi1s.size();
        const std::size_t it2 = rest % grid.theta2s.size();
        rest /= grid.theta2s.size();
        const std::size_t it1 = rest % grid.theta1s.size();
        rest /= grid.theta1s.size();
        const std::size_t ie = rest % grid.etas.size();
        rest /= grid.etas.size();
        const std::size_t im = rest;

        FidelityRecord rec;
        rec.model = grid.models[im];
        rec.eta = grid.etas[ie];
        rec.theta1 = grid.theta1s[it1];
        rec.theta2 = grid.theta2s[it2];
        rec.phi1 = grid.phi1s[i1];
        rec.phi2 = grid.phi2s[i2];

        NoisyRunConfig cfg;
        cfg.targetAtoB = TargetState{rec.theta1, rec.phi1};
        cfg.targetBtoA = TargetState{rec.theta2, rec.phi2};
        cfg.model = rec.model;
        cfg.eta = rec.eta;
        const NoisyRunResult result = noisy_probabilistic_fidelity(cfg);
        rec.F_sim = result.fidelity;
        rec.selection_probability = result.selection_probability;
        rec.F_closed = rec.model == NoiseModel::AmplitudeDamping
                           ? closed_form_F_AD(rec.theta1, rec.theta2, rec.eta)
                           : closed_form_F_PD(rec.theta1, rec.theta2, rec.eta);
        rec.abs_diff = std::abs(rec.F_sim - rec.F_closed);
        records[flat] = rec;
    };

    if (par::enabled()) {
        // Exceptions cannot unwind out of the parallel region; capture the
        // first one and rethrow after the loop joins.
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(total); ++flat) {
            try {
                evaluate(static_cast<std::size_t>(flat));
            } catch (...) {
#pragma omp critical(cbrsp_sweep_error)
                if (!error)
                    error = std::current_exception();
            }
        }
        if (error)
            std::rethrow_exception(error);
    } else {
        for (std::size_t flat = 0; flat < total; ++flat)
            evaluate(flat);
    }
    return records;
}

ComparisonReport compare_report(const std::vector<FidelityRecord>& records) {
    ComparisonReport report;
    report.points_total = records.size();
    double sum = 0.0;
    for (const auto& rec : records) {
        report.max_abs_diff = std::max(report.max_abs_diff, rec.abs_diff);
        sum += rec.abs_diff;
        if (rec.abs_diff > report.tolerance) {
            report.mismatches.push_back(rec);
            const double residual =
                std::abs(rec.F_closed - 8.0 * rec.selection_probability * rec.F_sim);
            report.max_scaling_residual = std::max(report.max_scaling_residual, residual);
            if (residual > report.tolerance)
                report.all_mismatches_explained_by_selection_scaling = false;
        }
    }
    report.mean_abs_diff = records.empty() ? 0.0 : sum / static_cast<double>(records.size());
    return report;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::ordered_json record_json(const FidelityRecord& r) {
    return nlohmann::ordered_json{
        {"model", noise::to_string(r.model)},
        {"eta", r.eta},
        {"theta1", r.theta1},
        {"theta2", r.theta2},
        {"phi1", r.phi1},
        {"phi2", r.phi2},
        {"F_sim", r.F_sim},
        {"F_closed", r.F_closed},
        {"abs_diff", r.abs_diff},
        {"selection_probability", r.selection_probability},
    };
}

} // namespace

void write_csv(std::ostream& out, const std::vector<FidelityRecord>& records) {
    out << "model,eta,theta1,theta2,phi1,phi2,F_sim,F_closed,abs_diff\n";
    for (const auto& r : records) {
        out << noise::to_string(r.model) << ',' << num(r.eta) << ',' << num(r.theta1) << ','
            << num(r.theta2) << ',' << num(r.phi1) << ',' << num(r.phi2) << ',' << num(r.F_sim)
            << ',' << num(r.F_closed) << ',' << num(r.abs_diff) << '\n';
    }
}

std::string records_to_json_string(const std::vector<FidelityRecord>& records, int indent) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : records)
        j.push_back(record_json(r));
    return j.dump(indent);
}

std::string report_to_json_string(const ComparisonReport& report, int indent) {
    nlohmann::ordered_json j;
    j["verdict"] = report.verdict();
    j["tolerance"] = report.tolerance;
    j["points_total"] = report.points_total;
    j["points_exceeding"] = report.mismatches.size();
    j["max_abs_diff"] = report.max_abs_diff;
    j["mean_abs_diff"] = report.mean_abs_diff;
    j["all_mismatches_explained_by_selection_scaling"] =
        report.all_mismatches_explained_by_selection_scaling;
    j["max_scaling_residual"] = report.max_scaling_residual;
    j["mismatches"] = nlohmann::ordered_json::array();
    for (const auto& r : report.mismatches)
        j["mismatches"].push_back(record_json(r));
    return j.dump(indent);
}

} // namespace cbrsp::analysis
