#pragma once

#include "cbrsp/channels.hpp"
#include "cbrsp/qmath.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// The three protocols as multi-party state machines (noiseless): each run
// produces a transcript of measurement events, classical broadcasts and the
// corrections applied by the receivers.

namespace cbrsp::protocols {

using channels::BellKind;
using channels::FiveQubitChannelSpec;
using channels::GhzKind;
using channels::SevenQubitChannelSpec;
using qmath::ComplexMatrix;
using qmath::cplx;
using qmath::SingleQubitBasis;
using qmath::StateVector;

/// The known single-qubit state a|0> + b e^{i phi}|1> with a = sin(theta),
/// b = cos(theta); theta in [0, pi/2], phi in [0, 2 pi).
struct TargetState {
    double theta = 0.0;
    double phi = 0.0;

    TargetState() = default;
    TargetState(double theta, double phi);

    double a() const { return std::sin(theta); }
    double b() const { return std::cos(theta); }
    StateVector ket() const;
};

enum class CorrectionOp { I, X, iY, Z };

std::string to_string(CorrectionOp op);
ComplexMatrix correction_matrix(CorrectionOp op); // iY = [[0,1],[-1,0]]

/// Measurement bases used by the senders.
SingleQubitBasis rsp_basis(const TargetState& target);       // {q1, q2}
SingleQubitBasis amplitude_basis(const TargetState& target); // {u0, u1}
SingleQubitBasis phase_basis(const TargetState& target);     // {v0, v1}

/// diag(1, e^{2 i phi}).
ComplexMatrix phase_gate(const TargetState& target);

/// Receiver correction for the single-measurement protocol. Defined only for
/// the q2 branch; querying the q1 branch throws (that branch fails).
CorrectionOp table1_correction(BellKind bell, int senderOutcome = 1);

/// Receiver correction for the two-measurement protocol, keyed by the shared
/// Bell state and the (u, v) outcomes.
CorrectionOp table2_correction(BellKind bell, int u, int v);

/// Receiver correction for the joint protocol, keyed by the shared GHZ state.
/// Columns pair up as {ghz0/ghz2}, so only x mod 2 and the sign matter.
CorrectionOp table3_correction(const GhzKind& ghz, int u, int v);

/// Whether the phase holder applies the phase gate before the v measurement:
/// on u0 for the low-ancilla GHZ family, on u1 for the high-ancilla one.
bool phase_gate_applies(int uOutcome, const GhzKind& revealed);

struct OutcomePolicy {
    enum class Mode { Forced, Sampled, EnumerateAll };
    Mode mode = Mode::EnumerateAll;
    std::vector<int> forced; // one entry per measurement, protocol order
    std::uint64_t seed = 0;

    static OutcomePolicy make_forced(std::vector<int> outcomes);
    static OutcomePolicy make_sampled(std::uint64_t seed);
    static OutcomePolicy enumerate_all();
};

struct MeasurementEvent {
    std::string party;
    std::string qubit; // "S1", "S2", "C1", "S1p", ...
    std::string basis; // "rsp", "amplitude", "phase", "controller"
    int outcome = 0;
    double probability = 0.0;
};

struct Broadcast {
    std::string party;
    std::vector<int> bits;
};

struct CorrectionEvent {
    std::string direction; // "a_to_b" | "b_to_a"
    CorrectionOp op = CorrectionOp::I;
};

struct DirectionResult {
    bool success = false;
    double conditional_fidelity = 0.0;
    std::array<cplx, 2> output_state{}; // receiver qubit after any correction
};

struct ProtocolTranscript {
    std::string protocol;
    std::string channel_spec;
    TargetState target_a_to_b, target_b_to_a;
    std::vector<MeasurementEvent> measurements;
    std::vector<Broadcast> broadcasts;
    std::vector<CorrectionEvent> corrections;
    DirectionResult a_to_b, b_to_a;
    double total_probability = 1.0; // product of branch probabilities

    std::string to_json_string(int indent = 2) const;
};

/// Party labels for the joint protocol's four sender roles. Per direction,
/// the amplitude holder measures the S qubit and the phase holder applies the
/// phase gate and measures S'.
struct KnowledgeSplit {
    std::string amp_a_to_b = "alice";
    std::string phase_a_to_b = "bob";
    std::string amp_b_to_a = "bob";
    std::string phase_b_to_a = "alice";
};

// Each runner returns one transcript per branch: a single element for Forced
// and Sampled policies, every branch (in a fixed order) for EnumerateAll.
//
// Forced-outcome order: probabilistic [alice q, bob q, charlie];
// deterministic/joint [alice u, alice v, bob u, bob v, charlie].
std::vector<ProtocolTranscript> run_probabilistic_cbrsp(const FiveQubitChannelSpec& spec,
                                                        const TargetState& targetAtoB,
                                                        const TargetState& targetBtoA,
                                                        const OutcomePolicy& policy);

std::vector<ProtocolTranscript> run_deterministic_cbrsp(const FiveQubitChannelSpec& spec,
                                                        const TargetState& targetAtoB,
                                                        const TargetState& targetBtoA,
                                                        const OutcomePolicy& policy);

std::vector<ProtocolTranscript> run_cjbrsp(const SevenQubitChannelSpec& spec,
                                           const TargetState& targetAtoB,
                                           const TargetState& targetBtoA,
                                           const KnowledgeSplit& split,
                                           const OutcomePolicy& policy);

} // namespace cbrsp::protocols
