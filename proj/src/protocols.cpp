#include "cbrsp/protocols.hpp"

#include "json.hpp"

#include <cmath>
#include <stdexcept>

namespace cbrsp::protocols {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kTwoPi = 6.28318530717958647692;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

TargetState::TargetState(double theta_, double phi_) : theta(theta_), phi(phi_) {
    if (!(theta >= 0.0 && theta <= M_PI / 2 + 1e-12))
        throw std::invalid_argument("target theta must lie in [0, pi/2]");
    if (!(phi >= 0.0 && phi < kTwoPi))
        throw std::invalid_argument("target phi must lie in [0, 2 pi)");
}

StateVector TargetState::ket() const {
    return StateVector::single_qubit(a(), b() * std::polar(1.0, phi));
}

std::string to_string(CorrectionOp op) {
    switch (op) {
    case CorrectionOp::I:
        return "I";
    case CorrectionOp::X:
        return "X";
    case CorrectionOp::iY:
        return "iY";
    case CorrectionOp::Z:
        return "Z";
    }
    throw std::logic_error("unreachable");
}

ComplexMatrix correction_matrix(CorrectionOp op) {
    switch (op) {
    case CorrectionOp::I:
        return qmath::ops::identity2();
    case CorrectionOp::X:
        return qmath::ops::pauli_x();
    case CorrectionOp::iY:
        return qmath::ops::i_pauli_y();
    case CorrectionOp::Z:
        return qmath::ops::pauli_z();
    }
    throw std::logic_error("unreachable");
}

SingleQubitBasis rsp_basis(const TargetState& t) {
    const cplx eip = std::polar(1.0, t.phi);
    return SingleQubitBasis::make({cplx{t.a(), 0}, t.b() * eip},
                                  {t.b() * std::conj(eip), cplx{-t.a(), 0}});
}

SingleQubitBasis amplitude_basis(const TargetState& t) {
    return SingleQubitBasis::make({cplx{t.a(), 0}, cplx{t.b(), 0}},
                                  {cplx{t.b(), 0}, cplx{-t.a(), 0}});
}

SingleQubitBasis phase_basis(const TargetState& t) {
    const cplx eip = std::polar(1.0, t.phi);
    return SingleQubitBasis::make({cplx{kInvSqrt2, 0}, kInvSqrt2 * eip},
                                  {kInvSqrt2 * std::conj(eip), cplx{-kInvSqrt2, 0}});
}

ComplexMatrix phase_gate(const TargetState& t) {
    ComplexMatrix m(2, 2);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = std::polar(1.0, 2.0 * t.phi);
    return m;
}

namespace {

constexpr int bell_index(BellKind bell) {
    switch (bell) {
    case BellKind::PsiPlus:
        return 0;
    case BellKind::PsiMinus:
        return 1;
    case BellKind::PhiPlus:
        return 2;
    case BellKind::PhiMinus:
        return 3;
    }
    return -1;
}

// Rows are (u,v) = (0,0),(0,1),(1,0),(1,1); columns psi+, psi-, phi+, phi-.
constexpr CorrectionOp kTwoMeasurementTable[4][4] = {
    {CorrectionOp::I, CorrectionOp::Z, CorrectionOp::X, CorrectionOp::iY},
    {CorrectionOp::Z, CorrectionOp::I, CorrectionOp::iY, CorrectionOp::X},
    {CorrectionOp::iY, CorrectionOp::X, CorrectionOp::Z, CorrectionOp::I},
    {CorrectionOp::X, CorrectionOp::iY, CorrectionOp::I, CorrectionOp::Z},
};

void check_bit(int value, const char* what) {
    if (value != 0 && value != 1)
        throw std::invalid_argument(std::string(what) + " must be 0 or 1");
}

} // namespace

CorrectionOp table1_correction(BellKind bell, int senderOutcome) {
    check_bit(senderOutcome, "sender outcome");
    if (senderOutcome == 0)
        throw std::domain_error("protocol fails on the q1 branch; no correction exists");
    switch (bell) {
    case BellKind::PsiPlus:
        return CorrectionOp::iY;
    case BellKind::PsiMinus:
        return CorrectionOp::X;
    case BellKind::PhiPlus:
        return CorrectionOp::Z;
    case BellKind::PhiMinus:
        return CorrectionOp::I;
    }
    throw std::logic_error("unreachable");
}

CorrectionOp table2_correction(BellKind bell, int u, int v) {
    check_bit(u, "u outcome");
    check_bit(v, "v outcome");
    return kTwoMeasurementTable[2 * u + v][bell_index(bell)];
}

CorrectionOp table3_correction(const GhzKind& ghz, int u, int v) {
    check_bit(u, "u outcome");
    check_bit(v, "v outcome");
    if (ghz.x < 0 || ghz.x > 3)
        throw std::invalid_argument("GHZ index out of range");
    const int column = (ghz.x % 2 == 1 ? 2 : 0) + (ghz.sign < 0 ? 1 : 0);
    return kTwoMeasurementTable[2 * u + v][column];
}

bool phase_gate_applies(int uOutcome, const GhzKind& revealed) {
    check_bit(uOutcome, "u outcome");
    return (uOutcome == 0) ==
           (channels::family_of(revealed) == channels::GhzFamily::LowAncilla);
}

OutcomePolicy OutcomePolicy::make_forced(std::vector<int> outcomes) {
    OutcomePolicy p;
    p.mode = Mode::Forced;
    p.forced = std::move(outcomes);
    return p;
}

OutcomePolicy OutcomePolicy::make_sampled(std::uint64_t seed) {
    OutcomePolicy p;
    p.mode = Mode::Sampled;
    p.seed = seed;
    return p;
}

OutcomePolicy OutcomePolicy::enumerate_all() {
    OutcomePolicy p;
    p.mode = Mode::EnumerateAll;
    return p;
}

namespace {

// Resolves measurement outcomes for one protocol run, either from a forced
// outcome list (slot-indexed) or by seeded sampling.
class OutcomeSource {
public:
    OutcomeSource(std::vector<int> forced) : forced_(std::move(forced)) {}
    explicit OutcomeSource(std::uint64_t seed) : seed_(seed), sampled_(true) {}

    qmath::StateMeasurement resolve(std::size_t slot, const StateVector& state,
                                    std::size_t qubit, const SingleQubitBasis& basis) const {
        if (sampled_)
            return qmath::measure_in_basis(state, qubit, basis, std::nullopt,
                                           splitmix64(seed_ + slot));
        return qmath::measure_in_basis(state, qubit, basis, forced_.at(slot));
    }

private:
    std::vector<int> forced_;
    std::uint64_t seed_ = 0;
    bool sampled_ = false;
};

struct MeasureStep {
    std::size_t slot;
    const char* party;
    const char* qubitLabel;
    const char* basisLabel;
    std::size_t qubit;
    SingleQubitBasis basis;
};

int do_measure(StateVector& state, ProtocolTranscript& tr, const OutcomeSource& src,
               const MeasureStep& step) {
    auto result = src.resolve(step.slot, state, step.qubit, step.basis);
    tr.measurements.push_back(MeasurementEvent{step.party, step.qubitLabel, step.basisLabel,
                                               result.info.outcome, result.info.probability});
    tr.total_probability *= result.info.probability;
    state = std::move(result.post);
    return result.info.outcome;
}

std::array<cplx, 2> extract_single_qubit(const qmath::DensityMatrix& reduced) {
    const auto& m = reduced.matrix();
    const std::size_t j = m.at(0, 0).real() >= m.at(1, 1).real() ? 0 : 1;
    const double d = std::sqrt(m.at(j, j).real());
    return {m.at(0, j) / d, m.at(1, j) / d};
}

void finish_direction(StateVector& state, ProtocolTranscript& tr, DirectionResult& out,
                      const char* direction, bool success, std::optional<CorrectionOp> correction,
                      std::size_t receiverQubit, const TargetState& target) {
    if (success && correction) {
        const std::size_t targets[] = {receiverQubit};
        state = qmath::apply_on_qubits(state, correction_matrix(*correction), targets);
        tr.corrections.push_back(CorrectionEvent{direction, *correction});
    }
    const std::size_t keep[] = {receiverQubit};
    const auto reduced = qmath::partial_trace(qmath::DensityMatrix::pure(state), keep);
    out.success = success;
    out.conditional_fidelity = qmath::fidelity_pure_vs_mixed(target.ket(), reduced);
    out.output_state = extract_single_qubit(reduced);
}

ProtocolTranscript run_probabilistic_one(const FiveQubitChannelSpec& spec, const TargetState& t1,
                                         const TargetState& t2, const OutcomeSource& src) {
    ProtocolTranscript tr;
    tr.protocol = "probabilistic";
    tr.channel_spec = channels::to_string(spec);
    tr.target_a_to_b = t1;
    tr.target_b_to_a = t2;

    // Charlie distributes S1, R2 to Alice and R1, S2 to Bob; qubit order
    // S1 R1 S2 R2 C1.
    StateVector state = channels::make_five_qubit_channel(spec);
    const int oA = do_measure(state, tr, src, {0, "alice", "S1", "rsp", 0, rsp_basis(t1)});
    const int oB = do_measure(state, tr, src, {1, "bob", "S2", "rsp", 2, rsp_basis(t2)});
    const int oC =
        do_measure(state, tr, src, {2, "charlie", "C1", "controller", 4, spec.charlie.basis()});
    tr.broadcasts = {{"alice", {oA}}, {"bob", {oB}}, {"charlie", {oC}}};

    const BellKind bellAtoB = oC == 0 ? spec.psi1 : spec.psi3;
    const BellKind bellBtoA = oC == 0 ? spec.psi2 : spec.psi4;
    const bool okA = oA == 1; // succeeds only on the q2 branch
    const bool okB = oB == 1;
    finish_direction(state, tr, tr.a_to_b, "a_to_b", okA,
                     okA ? std::optional(table1_correction(bellAtoB)) : std::nullopt, 1, t1);
    finish_direction(state, tr, tr.b_to_a, "b_to_a", okB,
                     okB ? std::optional(table1_correction(bellBtoA)) : std::nullopt, 3, t2);
    return tr;
}

ProtocolTranscript run_deterministic_one(const FiveQubitChannelSpec& spec, const TargetState& t1,
                                         const TargetState& t2, const OutcomeSource& src) {
    ProtocolTranscript tr;
    tr.protocol = "deterministic";
    tr.channel_spec = channels::to_string(spec);
    tr.target_a_to_b = t1;
    tr.target_b_to_a = t2;

    // Each sender appends a local |0> ancilla and entangles it with a CNOT.
    // Qubit layout: S1=0 R1=1 S2=2 R2=3 C1=4 S1'=5 S2'=6.
    StateVector state = tensor_product(channels::make_five_qubit_channel(spec),
                                       StateVector::basis_state(2, 0));
    const std::size_t cnotA[] = {0, 5};
    const std::size_t cnotB[] = {2, 6};
    state = qmath::apply_on_qubits(state, qmath::ops::cnot(), cnotA);
    state = qmath::apply_on_qubits(state, qmath::ops::cnot(), cnotB);

    const std::size_t piA[] = {5}, piB[] = {6};
    const int uA = do_measure(state, tr, src, {0, "alice", "S1", "amplitude", 0, amplitude_basis(t1)});
    if (uA == 0)
        state = qmath::apply_on_qubits(state, phase_gate(t1), piA);
    const int vA = do_measure(state, tr, src, {1, "alice", "S1p", "phase", 5, phase_basis(t1)});
    const int uB = do_measure(state, tr, src, {2, "bob", "S2", "amplitude", 2, amplitude_basis(t2)});
    if (uB == 0)
        state = qmath::apply_on_qubits(state, phase_gate(t2), piB);
    const int vB = do_measure(state, tr, src, {3, "bob", "S2p", "phase", 6, phase_basis(t2)});
    const int oC =
        do_measure(state, tr, src, {4, "charlie", "C1", "controller", 4, spec.charlie.basis()});
    tr.broadcasts = {{"alice", {uA, vA}}, {"bob", {uB, vB}}, {"charlie", {oC}}};

    const BellKind bellAtoB = oC == 0 ? spec.psi1 : spec.psi3;
    const BellKind bellBtoA = oC == 0 ? spec.psi2 : spec.psi4;
    finish_direction(state, tr, tr.a_to_b, "a_to_b", true, table2_correction(bellAtoB, uA, vA), 1,
                     t1);
    finish_direction(state, tr, tr.b_to_a, "b_to_a", true, table2_correction(bellBtoA, uB, vB), 3,
                     t2);
    return tr;
}

ProtocolTranscript run_cjbrsp_one(const SevenQubitChannelSpec& spec, const TargetState& t1,
                                  const TargetState& t2, const KnowledgeSplit& split,
                                  const OutcomeSource& src) {
    ProtocolTranscript tr;
    tr.protocol = "joint";
    tr.channel_spec = channels::to_string(spec);
    tr.target_a_to_b = t1;
    tr.target_b_to_a = t2;

    // Qubit layout: S1=0 S1'=1 R1=2 S2=3 S2'=4 R2=5 C1=6.
    StateVector state = channels::make_seven_qubit_channel(spec);

    const int uA = do_measure(
        state, tr, src, {0, split.amp_a_to_b.c_str(), "S1", "amplitude", 0, amplitude_basis(t1)});
    const int uB = do_measure(
        state, tr, src, {2, split.amp_b_to_a.c_str(), "S2", "amplitude", 3, amplitude_basis(t2)});
    // The phase holders may have to wait for the controller's disclosure to
    // decide whether the phase gate applies (mixed-family channels).
    const int oC =
        do_measure(state, tr, src, {4, "charlie", "C1", "controller", 6, spec.charlie.basis()});

    const GhzKind ghzAtoB = oC == 0 ? spec.ghz1 : spec.ghz3;
    const GhzKind ghzBtoA = oC == 0 ? spec.ghz2 : spec.ghz4;
    const std::size_t piA[] = {1}, piB[] = {4};
    if (phase_gate_applies(uA, ghzAtoB))
        state = qmath::apply_on_qubits(state, phase_gate(t1), piA);
    const int vA = do_measure(
        state, tr, src, {1, split.phase_a_to_b.c_str(), "S1p", "phase", 1, phase_basis(t1)});
    if (phase_gate_applies(uB, ghzBtoA))
        state = qmath::apply_on_qubits(state, phase_gate(t2), piB);
    const int vB = do_measure(
        state, tr, src, {3, split.phase_b_to_a.c_str(), "S2p", "phase", 4, phase_basis(t2)});

    tr.broadcasts = {{split.amp_a_to_b, {uA}},
                     {split.amp_b_to_a, {uB}},
                     {"charlie", {oC}},
                     {split.phase_a_to_b, {vA}},
                     {split.phase_b_to_a, {vB}}};

    finish_direction(state, tr, tr.a_to_b, "a_to_b", true, table3_correction(ghzAtoB, uA, vA), 2,
                     t1);
    finish_direction(state, tr, tr.b_to_a, "b_to_a", true, table3_correction(ghzBtoA, uB, vB), 5,
                     t2);
    return tr;
}

template <typename RunOne>
std::vector<ProtocolTranscript> drive(const OutcomePolicy& policy, std::size_t slotCount,
                                      RunOne&& runOne) {
    std::vector<ProtocolTranscript> out;
    switch (policy.mode) {
    case OutcomePolicy::Mode::Forced: {
        if (policy.forced.size() != slotCount)
            throw std::invalid_argument("forced outcome list must have " +
                                        std::to_string(slotCount) + " entries");
        out.push_back(runOne(OutcomeSource(policy.forced)));
        break;
    }
    case OutcomePolicy::Mode::Sampled:
        out.push_back(runOne(OutcomeSource(policy.seed)));
        break;
    case OutcomePolicy::Mode::EnumerateAll: {
        const std::size_t count = std::size_t{1} << slotCount;
        out.reserve(count);
        for (std::size_t combo = 0; combo < count; ++combo) {
            std::vector<int> forced(slotCount);
            for (std::size_t s = 0; s < slotCount; ++s)
                forced[s] = static_cast<int>((combo >> (slotCount - 1 - s)) & 1u);
            out.push_back(runOne(OutcomeSource(std::move(forced))));
        }
        break;
    }
    }
    return out;
}

} // namespace

std::vector<ProtocolTranscript> run_probabilistic_cbrsp(const FiveQubitChannelSpec& spec,
                                                        const TargetState& targetAtoB,
                                                        const TargetState& targetBtoA,
                                                        const OutcomePolicy& policy) {
    spec.validate();
    return drive(policy, 3, [&](const OutcomeSource& src) {
        return run_probabilistic_one(spec, targetAtoB, targetBtoA, src);
    });
}

std::vector<ProtocolTranscript> run_deterministic_cbrsp(const FiveQubitChannelSpec& spec,
                                                        const TargetState& targetAtoB,
                                                        const TargetState& targetBtoA,
                                                        const OutcomePolicy& policy) {
    spec.validate();
    return drive(policy, 5, [&](const OutcomeSource& src) {
        return run_deterministic_one(spec, targetAtoB, targetBtoA, src);
    });
}

std::vector<ProtocolTranscript> run_cjbrsp(const SevenQubitChannelSpec& spec,
                                           const TargetState& targetAtoB,
                                           const TargetState& targetBtoA,
                                           const KnowledgeSplit& split,
                                           const OutcomePolicy& policy) {
    spec.validate();
    return drive(policy, 5, [&](const OutcomeSource& src) {
        return run_cjbrsp_one(spec, targetAtoB, targetBtoA, split, src);
    });
}

std::string ProtocolTranscript::to_json_string(int indent) const {
    using json = nlohmann::ordered_json;
    json j;
    j["protocol"] = protocol;
    j["channel_spec"] = channel_spec;
    j["targets"] = {{"a_to_b", {{"theta", target_a_to_b.theta}, {"phi", target_a_to_b.phi}}},
                    {"b_to_a", {{"theta", target_b_to_a.theta}, {"phi", target_b_to_a.phi}}}};
    j["measurements"] = json::array();
    for (const auto& m : measurements)
        j["measurements"].push_back({{"party", m.party},
                                     {"qubit", m.qubit},
                                     {"basis", m.basis},
                                     {"outcome", m.outcome},
                                     {"probability", m.probability}});
    j["broadcasts"] = json::array();
    for (const auto& b : broadcasts)
        j["broadcasts"].push_back({{"party", b.party}, {"bits", b.bits}});
    j["corrections"] = json::array();
    for (const auto& c : corrections)
        j["corrections"].push_back({{"direction", c.direction}, {"op", to_string(c.op)}});
    const auto direction_json = [](const DirectionResult& d) {
        return json{{"success", d.success},
                    {"conditional_fidelity", d.conditional_fidelity},
                    {"output_state",
                     {{d.output_state[0].real(), d.output_state[0].imag()},
                      {d.output_state[1].real(), d.output_state[1].imag()}}}};
    };
    j["directions"] = {{"a_to_b", direction_json(a_to_b)}, {"b_to_a", direction_json(b_to_a)}};
    j["total_probability"] = total_probability;
    return j.dump(indent);
}

} // namespace cbrsp::protocols
