#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbrsp/channels.hpp"
#include "cbrsp/protocols.hpp"
#include "cbrsp/qmath.hpp"

#include <cmath>
#include <random>

using namespace cbrsp;
using namespace cbrsp::protocols;
using channels::BellKind;
using channels::CharlieBasis;
using channels::GhzKind;
using qmath::cplx;

namespace {

constexpr double kTol = qmath::tol::kAlgebra;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

TargetState random_target(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return TargetState{u(rng) * M_PI / 2, u(rng) * 6.283185307179586};
}

} // namespace

TEST_CASE("rsp basis") {
    const auto b = rsp_basis(TargetState{M_PI / 4, 0.0});
    CHECK(std::abs(b.first[0] - kInvSqrt2) < kTol);
    CHECK(std::abs(b.first[1] - kInvSqrt2) < kTol);
    CHECK(std::abs(b.second[0] - kInvSqrt2) < kTol);
    CHECK(std::abs(b.second[1] + kInvSqrt2) < kTol);

    const auto degenerate = rsp_basis(TargetState{M_PI / 2, 0.0}); // a=1, b=0
    CHECK(std::abs(degenerate.first[0] - 1.0) < kTol);
    CHECK(std::abs(degenerate.second[1] + 1.0) < kTol);

    const auto rotated = rsp_basis(TargetState{M_PI / 4, M_PI / 2});
    CHECK(std::abs(rotated.second[0] - cplx{0, -kInvSqrt2}) < kTol);
    CHECK(std::abs(rotated.second[1] + kInvSqrt2) < kTol);
}

TEST_CASE("amplitude and phase bases") {
    const auto h = amplitude_basis(TargetState{M_PI / 4, 0.0});
    CHECK(std::abs(h.first[0] - kInvSqrt2) < kTol); // Hadamard-type pair
    CHECK(std::abs(h.second[1] + kInvSqrt2) < kTol);

    const auto u = amplitude_basis(TargetState{0.0, 0.0}); // a=0, b=1
    CHECK(std::abs(u.first[1] - 1.0) < kTol);              // u0 = |1>
    CHECK(std::abs(u.second[0] - 1.0) < kTol);             // u1 = |0>

    const auto v0 = phase_basis(TargetState{M_PI / 3, 0.0});
    CHECK(std::abs(v0.first[0] - kInvSqrt2) < kTol);
    CHECK(std::abs(v0.first[1] - kInvSqrt2) < kTol);

    const auto vpi = phase_basis(TargetState{M_PI / 3, M_PI});
    CHECK(std::abs(vpi.first[1] + kInvSqrt2) < kTol);  // (|0> - |1>)/sqrt2
    CHECK(std::abs(vpi.second[0] + kInvSqrt2) < kTol); // (-|0> - |1>)/sqrt2
    CHECK(std::abs(vpi.second[1] + kInvSqrt2) < kTol);
}

TEST_CASE("phase gate") {
    CHECK(phase_gate(TargetState{0.3, 0.0}).max_abs_diff(qmath::ops::identity2()) < kTol);
    CHECK(phase_gate(TargetState{0.3, M_PI / 2}).max_abs_diff(qmath::ops::pauli_z()) < kTol);
    CHECK(phase_gate(TargetState{0.3, 2.2}).is_unitary());
}

TEST_CASE("correction tables") {
    CHECK(table1_correction(BellKind::PhiMinus) == CorrectionOp::I);
    CHECK(table1_correction(BellKind::PsiPlus) == CorrectionOp::iY);
    CHECK(table1_correction(BellKind::PsiMinus) == CorrectionOp::X);
    CHECK(table1_correction(BellKind::PhiPlus) == CorrectionOp::Z);
    CHECK_THROWS_AS(table1_correction(BellKind::PsiPlus, 0), std::domain_error);

    CHECK(table2_correction(BellKind::PsiPlus, 0, 0) == CorrectionOp::I);
    CHECK(table2_correction(BellKind::PhiPlus, 1, 0) == CorrectionOp::Z);
    CHECK(table2_correction(BellKind::PsiMinus, 0, 1) == CorrectionOp::I);

    CHECK(table3_correction(GhzKind{0, +1}, 0, 1) == CorrectionOp::Z);
    CHECK(table3_correction(GhzKind{3, -1}, 1, 0) == CorrectionOp::I);
    CHECK(table3_correction(GhzKind{2, +1}, 1, 1) == CorrectionOp::X);
    // Column classes pair x with x+2.
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v)
            for (int sign : {+1, -1})
                for (int x : {0, 1})
                    CHECK(table3_correction(GhzKind{x, sign}, u, v) ==
                          table3_correction(GhzKind{x + 2, sign}, u, v));
}

TEST_CASE("corrections are involutive up to a global phase") {
    for (auto op : {CorrectionOp::I, CorrectionOp::X, CorrectionOp::iY, CorrectionOp::Z}) {
        const auto m = correction_matrix(op);
        const auto twice = m * m;
        const cplx scale = twice.at(0, 0);
        CHECK(std::abs(std::abs(scale) - 1.0) < kTol);
        CHECK(twice.max_abs_diff(qmath::ComplexMatrix::identity(2) * scale) < kTol);
    }
}

TEST_CASE("phase gate rule per GHZ family") {
    CHECK(phase_gate_applies(0, GhzKind{0, +1}));
    CHECK(phase_gate_applies(0, GhzKind{1, -1}));
    CHECK_FALSE(phase_gate_applies(1, GhzKind{1, -1}));
    CHECK(phase_gate_applies(1, GhzKind{2, +1}));
    CHECK(phase_gate_applies(1, GhzKind{3, -1}));
    CHECK_FALSE(phase_gate_applies(0, GhzKind{2, +1}));
}

TEST_CASE("single-pair measurement collapses to the target") {
    std::mt19937_64 rng(41);
    const auto target = random_target(rng);
    const auto pair = channels::make_bell(BellKind::PhiMinus);
    const auto basis = rsp_basis(target);

    const auto m0 = qmath::measure_in_basis(pair, 0, basis, 0);
    const auto m1 = qmath::measure_in_basis(pair, 0, basis, 1);
    CHECK(m0.info.probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m1.info.probability == doctest::Approx(0.5).epsilon(1e-12));

    // On the q2 branch the partner qubit is exactly the target ket.
    const auto targetKet = target.ket();
    cplx receiver0{0, 0}, receiver1{0, 0};
    for (std::size_t i = 0; i < 4; ++i) {
        const cplx amp = m1.post.amplitude(i);
        // factor out the sender's q2 component
        const cplx sender = (i >> 1) == 0 ? basis.second[0] : basis.second[1];
        if (std::abs(sender) < 1e-9)
            continue;
        if ((i & 1) == 0)
            receiver0 = amp / sender;
        else
            receiver1 = amp / sender;
    }
    CHECK(std::abs(receiver0 - targetKet.amplitude(0)) < 1e-11);
    CHECK(std::abs(receiver1 - targetKet.amplitude(1)) < 1e-11);
}

TEST_CASE("probabilistic run with forced outcomes") {
    const TargetState t{M_PI / 4, 0.0};
    const auto transcripts = run_probabilistic_cbrsp(channels::cao_an_preset(), t, t,
                                                     OutcomePolicy::make_forced({1, 1, 0}));
    REQUIRE(transcripts.size() == 1);
    const auto& tr = transcripts.front();
    CHECK(tr.a_to_b.success);
    CHECK(tr.b_to_a.success);
    CHECK(tr.a_to_b.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.b_to_a.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.total_probability == doctest::Approx(0.125).epsilon(1e-12));
    // Revealed pairs on the |a> branch are psi+, psi+ -> both corrections iY.
    REQUIRE(tr.corrections.size() == 2);
    CHECK(tr.corrections[0].op == CorrectionOp::iY);
    CHECK(tr.corrections[1].op == CorrectionOp::iY);
    // One classical bit per sender plus one from the controller.
    REQUIRE(tr.broadcasts.size() == 3);
    CHECK(tr.broadcasts[0].bits.size() == 1);
    CHECK(tr.broadcasts[1].bits.size() == 1);
    CHECK(tr.broadcasts[2].bits.size() == 1);
}

TEST_CASE("probabilistic q1 branch fails") {
    const TargetState t{0.9, 2.0};
    const auto transcripts = run_probabilistic_cbrsp(channels::noise_study_preset(), t, t,
                                                     OutcomePolicy::make_forced({0, 1, 1}));
    const auto& tr = transcripts.front();
    CHECK_FALSE(tr.a_to_b.success);
    CHECK(tr.b_to_a.success);
    CHECK(tr.b_to_a.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("probabilistic enumeration totals") {
    std::mt19937_64 rng(4242);
    const auto t1 = random_target(rng), t2 = random_target(rng);
    const auto branches = run_probabilistic_cbrsp(channels::cao_an_preset(), t1, t2,
                                                  OutcomePolicy::enumerate_all());
    REQUIRE(branches.size() == 8);
    double total = 0.0, bothSuccess = 0.0, successA = 0.0;
    for (const auto& tr : branches) {
        total += tr.total_probability;
        if (tr.a_to_b.success)
            successA += tr.total_probability;
        if (tr.a_to_b.success && tr.b_to_a.success)
            bothSuccess += tr.total_probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(successA == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bothSuccess == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("deterministic run succeeds on every branch") {
    const TargetState t1{M_PI / 3, 1.1}, t2{M_PI / 5, 4.0};
    const auto spec = channels::parse_five_qubit_spec("phi+,psi-,psi+,phi-;+;comp");
    const auto branches =
        run_deterministic_cbrsp(spec, t1, t2, OutcomePolicy::enumerate_all());
    REQUIRE(branches.size() == 32);
    double total = 0.0;
    for (const auto& tr : branches) {
        CHECK(tr.a_to_b.success);
        CHECK(tr.a_to_b.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tr.b_to_a.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
        // Branches are uniform regardless of the targets.
        CHECK(tr.total_probability == doctest::Approx(1.0 / 32).epsilon(1e-12));
        total += tr.total_probability;
        REQUIRE(tr.broadcasts.size() == 3);
        CHECK(tr.broadcasts[0].bits.size() == 2);
        CHECK(tr.broadcasts[1].bits.size() == 2);
        CHECK(tr.broadcasts[2].bits.size() == 1);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("deterministic correction matches the table per branch") {
    const TargetState t1{0.7, 0.4}, t2{1.2, 3.3};
    // psi1 = psi+, charlie |a> branch: (u0,v0) must apply I.
    const auto spec = channels::parse_five_qubit_spec("psi+,phi-,phi+,psi-;+;comp");
    const auto tr =
        run_deterministic_cbrsp(spec, t1, t2, OutcomePolicy::make_forced({0, 0, 1, 0, 0}))
            .front();
    REQUIRE(tr.corrections.size() == 2);
    CHECK(tr.corrections[0].direction == "a_to_b");
    CHECK(tr.corrections[0].op == CorrectionOp::I);
    // B->A direction: psi2 = phi-, (u1, v0) -> I per the phi- column.
    CHECK(tr.corrections[1].op == table2_correction(BellKind::PhiMinus, 1, 0));
}

TEST_CASE("deterministic succeeds for every initial Bell pair") {
    std::mt19937_64 rng(77);
    for (BellKind bell : channels::kAllBellKinds) {
        channels::FiveQubitChannelSpec spec = channels::noise_study_preset();
        spec.psi1 = bell;
        spec.psi3 = bell == BellKind::PsiPlus ? BellKind::PsiMinus : BellKind::PsiPlus;
        const auto t1 = random_target(rng), t2 = random_target(rng);
        for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v) {
                const auto tr = run_deterministic_cbrsp(
                                    spec, t1, t2, OutcomePolicy::make_forced({u, v, 0, 0, 0}))
                                    .front();
                CHECK(tr.a_to_b.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
            }
    }
}

TEST_CASE("joint run branch spot checks") {
    const TargetState t1{0.6, 2.7}, t2{1.1, 0.9};
    channels::SevenQubitChannelSpec low{GhzKind{0, +1}, GhzKind{1, +1}, GhzKind{1, -1},
                                        GhzKind{0, -1}, +1, CharlieBasis::computational()};
    const auto tr =
        run_cjbrsp(low, t1, t2, KnowledgeSplit{}, OutcomePolicy::make_forced({0, 1, 0, 0, 0}))
            .front();
    CHECK(tr.corrections[0].op == CorrectionOp::Z); // ghz0+, (u0,v1)
    CHECK(tr.a_to_b.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.b_to_a.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));

    // High-ancilla family: every branch still reconstructs exactly.
    channels::SevenQubitChannelSpec high{GhzKind{2, +1}, GhzKind{3, +1}, GhzKind{3, -1},
                                         GhzKind{2, -1}, +1, CharlieBasis::computational()};
    for (const auto& branch : run_cjbrsp(high, t1, t2, KnowledgeSplit{},
                                         OutcomePolicy::enumerate_all())) {
        CHECK(branch.a_to_b.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(branch.b_to_a.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("joint run defers phase measurements until after the disclosure") {
    const TargetState t1{0.8, 1.9}, t2{0.4, 5.1};
    // Mixed families: ghz1 low but ghz3 high, so the phase-gate decision
    // depends on the controller's outcome.
    channels::SevenQubitChannelSpec mixed{GhzKind{1, +1}, GhzKind{0, +1}, GhzKind{3, +1},
                                          GhzKind{2, -1}, +1, CharlieBasis::computational()};
    for (const auto& tr : run_cjbrsp(mixed, t1, t2, KnowledgeSplit{},
                                     OutcomePolicy::enumerate_all())) {
        CHECK(tr.a_to_b.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tr.b_to_a.conditional_fidelity == doctest::Approx(1.0).epsilon(1e-12));
        // Event order: both amplitude measurements, then the controller,
        // then the phase measurements.
        REQUIRE(tr.measurements.size() == 5);
        CHECK(tr.measurements[2].party == "charlie");
        CHECK(tr.measurements[3].basis == "phase");
        CHECK(tr.measurements[4].basis == "phase");
    }
}

TEST_CASE("knowledge split labels the four sender roles") {
    KnowledgeSplit split;
    split.amp_a_to_b = "amy";
    split.phase_a_to_b = "ben";
    const auto spec = channels::seven_from_five(channels::noise_study_preset(), 0);
    const auto tr = run_cjbrsp(spec, TargetState{0.3, 0.1}, TargetState{0.5, 0.2}, split,
                               OutcomePolicy::make_forced({0, 0, 0, 0, 0}))
                        .front();
    CHECK(tr.measurements[0].party == "amy");
    CHECK(tr.measurements[3].party == "ben");
}

TEST_CASE("sampled runs are reproducible") {
    const TargetState t1{0.5, 0.3}, t2{1.0, 4.5};
    const auto a = run_probabilistic_cbrsp(channels::noise_study_preset(), t1, t2,
                                           OutcomePolicy::make_sampled(99));
    const auto b = run_probabilistic_cbrsp(channels::noise_study_preset(), t1, t2,
                                           OutcomePolicy::make_sampled(99));
    CHECK(a.front().to_json_string() == b.front().to_json_string());
}

TEST_CASE("forced list length is validated") {
    const TargetState t{0.4, 0.0};
    CHECK_THROWS_AS(run_probabilistic_cbrsp(channels::noise_study_preset(), t, t,
                                            OutcomePolicy::make_forced({1, 1})),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_deterministic_cbrsp(channels::noise_study_preset(), t, t,
                                            OutcomePolicy::make_forced({1, 1, 1})),
                    std::invalid_argument);
}

TEST_CASE("target state validation") {
    CHECK_THROWS_AS(TargetState(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TargetState(0.4, 6.4), std::invalid_argument);
    const TargetState t{0.4, 1.0};
    CHECK(t.a() * t.a() + t.b() * t.b() == doctest::Approx(1.0).epsilon(1e-15));
}
