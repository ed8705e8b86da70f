#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbrsp/channels.hpp"
#include "cbrsp/qmath.hpp"

#include <cmath>
#include <set>

using namespace cbrsp;
using namespace cbrsp::channels;
using qmath::cplx;
using qmath::StateVector;

namespace {

constexpr double kTol = qmath::tol::kAlgebra;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double state_diff(const StateVector& a, const StateVector& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        worst = std::max(worst, std::abs(a.amplitude(i) - b.amplitude(i)));
    return worst;
}

} // namespace

TEST_CASE("bell states") {
    const auto psiPlus = make_bell(BellKind::PsiPlus);
    CHECK(std::abs(psiPlus.amplitude(0) - kInvSqrt2) < kTol);
    CHECK(std::abs(psiPlus.amplitude(3) - kInvSqrt2) < kTol);

    const auto phiMinus = make_bell(BellKind::PhiMinus);
    CHECK(std::abs(phiMinus.amplitude(1) - kInvSqrt2) < kTol);
    CHECK(std::abs(phiMinus.amplitude(2) + kInvSqrt2) < kTol);

    for (BellKind a : kAllBellKinds)
        for (BellKind b : kAllBellKinds) {
            const auto ov = qmath::inner_product(make_bell(a), make_bell(b));
            CHECK(std::abs(ov - (a == b ? cplx{1, 0} : cplx{0, 0})) < kTol);
        }
}

TEST_CASE("ghz states") {
    const auto g0 = make_ghz(GhzKind{0, +1});
    CHECK(std::abs(g0.amplitude(0) - kInvSqrt2) < kTol);
    CHECK(std::abs(g0.amplitude(7) - kInvSqrt2) < kTol);

    const auto g3m = make_ghz(GhzKind{3, -1}); // (|011> - |100>)/sqrt2
    CHECK(std::abs(g3m.amplitude(3) - kInvSqrt2) < kTol);
    CHECK(std::abs(g3m.amplitude(4) + kInvSqrt2) < kTol);

    const auto g2p = make_ghz(GhzKind{2, +1}); // (|010> + |101>)/sqrt2
    CHECK(std::abs(g2p.amplitude(2) - kInvSqrt2) < kTol);
    CHECK(std::abs(g2p.amplitude(5) - kInvSqrt2) < kTol);
}

TEST_CASE("ghz from bell and ancilla matches the CNOT construction") {
    CHECK(ghz_from_bell_and_ancilla(BellKind::PsiPlus, 0) == GhzKind{0, +1});
    CHECK(ghz_from_bell_and_ancilla(BellKind::PhiMinus, 1) == GhzKind{3, -1});
    CHECK(ghz_from_bell_and_ancilla(BellKind::PsiMinus, 1) == GhzKind{2, -1});

    for (BellKind bell : kAllBellKinds)
        for (int anc : {0, 1}) {
            // bell_{SR} (x) |anc>_{S'}, reordered to (S, S', R), then CNOT.
            const std::size_t orderSSpR[] = {0, 2, 1};
            const auto input = qmath::permute_qubits(
                tensor_product(make_bell(bell), StateVector::basis_state(1, anc)), orderSSpR);
            const std::size_t cnotTargets[] = {0, 1};
            const auto built = qmath::apply_on_qubits(input, qmath::ops::cnot(), cnotTargets);
            const auto named = make_ghz(ghz_from_bell_and_ancilla(bell, anc));
            CHECK(state_diff(built, named) < kTol);
        }
}

TEST_CASE("cao-an preset equals the swapped four-term state") {
    // (|00000> + |01011> + |10101> + |11110>)/2 on A1 A2 B1 B2 C1, reordered
    // to S1 R1 S2 R2 C1 via (S1,R1,S2,R2,C1) = (A1,B1,B2,A2,C1).
    std::vector<cplx> amps(32, cplx{0, 0});
    amps[0b00000] = 0.5;
    amps[0b01011] = 0.5;
    amps[0b10101] = 0.5;
    amps[0b11110] = 0.5;
    const auto original = StateVector::from_amplitudes(5, std::move(amps));
    const std::size_t reorder[] = {0, 2, 3, 1, 4};
    const auto expected = qmath::permute_qubits(original, reorder);
    CHECK(state_diff(make_five_qubit_channel(cao_an_preset()), expected) < kTol);
}

TEST_CASE("noise-study preset amplitudes") {
    const auto st = make_five_qubit_channel(noise_study_preset());
    const double v = 1.0 / (2.0 * std::sqrt(2.0));
    const std::pair<std::size_t, double> expected[] = {
        {0b00000, v}, {0b00110, v}, {0b11000, v}, {0b11110, v},
        {0b01011, v}, {0b01101, -v}, {0b10011, -v}, {0b10101, v},
    };
    double sum = 0.0;
    for (const auto& [idx, val] : expected) {
        CHECK(std::abs(st.amplitude(idx) - val) < kTol);
        sum += val * val;
    }
    CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("five-qubit channel branch structure") {
    const auto specs = enumerate_five_qubit_specs(CharlieBasis::computational());
    for (const auto& spec : specs) {
        const auto st = make_five_qubit_channel(spec);
        CHECK(std::abs(st.norm() - 1.0) < kTol);

        // Projecting C1 onto |a> (|b>) leaves |psi1 psi2> (|psi3 psi4>).
        for (int outcome : {0, 1}) {
            const auto m = qmath::measure_in_basis(st, 4, spec.charlie.basis(), outcome);
            CHECK(m.info.probability == doctest::Approx(0.5).epsilon(1e-12));
            const auto pair = tensor_product(make_bell(outcome == 0 ? spec.psi1 : spec.psi3),
                                             make_bell(outcome == 0 ? spec.psi2 : spec.psi4));
            double worst = 0.0;
            for (std::size_t i = 0; i < 16; ++i) {
                // After the measurement the C1 qubit sits in the outcome state.
                cplx got{0, 0};
                for (std::size_t c = 0; c < 2; ++c) {
                    const auto& v = outcome == 0 ? spec.charlie.a : spec.charlie.b;
                    got += std::conj(v[c]) * m.post.amplitude(i * 2 + c);
                }
                worst = std::max(worst, std::abs(got - pair.amplitude(i)));
            }
            CHECK(worst < kTol);
        }

        // The controller's reduced state is maximally mixed.
        const std::size_t keepC[] = {4};
        const auto reduced = qmath::partial_trace(qmath::DensityMatrix::pure(st), keepC);
        CHECK(reduced.matrix().max_abs_diff(qmath::ComplexMatrix::identity(2) * cplx{0.5, 0}) <
              kTol);
    }
}

TEST_CASE("channel spec validation") {
    FiveQubitChannelSpec bad = noise_study_preset();
    bad.psi3 = bad.psi1;
    CHECK_THROWS_AS(make_five_qubit_channel(bad), std::invalid_argument);

    SevenQubitChannelSpec badSeven{GhzKind{0, +1}, GhzKind{1, +1}, GhzKind{0, +1},
                                   GhzKind{0, +1}, +1, CharlieBasis::computational()};
    CHECK_THROWS_AS(make_seven_qubit_channel(badSeven), std::invalid_argument);
}

TEST_CASE("seven-qubit channel equals the CNOT construction") {
    const auto fives = enumerate_five_qubit_specs(CharlieBasis::computational());
    for (std::size_t i = 0; i < fives.size(); i += 31) {
        for (int anc : {0, 1}) {
            const auto& five = fives[i];
            // channel (x) |anc,anc> on S1 R1 S2 R2 C1 S1' S2', CNOTs, then
            // reorder to S1 S1' R1 S2 S2' R2 C1.
            auto st = tensor_product(make_five_qubit_channel(five),
                                     StateVector::basis_state(2, anc * 3));
            const std::size_t cnotA[] = {0, 5}, cnotB[] = {2, 6};
            st = qmath::apply_on_qubits(st, qmath::ops::cnot(), cnotA);
            st = qmath::apply_on_qubits(st, qmath::ops::cnot(), cnotB);
            const std::size_t order[] = {0, 5, 1, 2, 6, 3, 4};
            const auto expected = qmath::permute_qubits(st, order);

            const auto seven = seven_from_five(five, anc);
            for (const GhzKind& g : {seven.ghz1, seven.ghz2, seven.ghz3, seven.ghz4})
                CHECK(family_of(g) == (anc == 0 ? GhzFamily::LowAncilla : GhzFamily::HighAncilla));
            CHECK(state_diff(make_seven_qubit_channel(seven), expected) < kTol);
        }
    }

    // Mixed-family specs are accepted.
    const SevenQubitChannelSpec mixed{GhzKind{1, +1}, GhzKind{0, +1}, GhzKind{3, +1},
                                      GhzKind{2, +1}, +1, CharlieBasis::computational()};
    CHECK(std::abs(make_seven_qubit_channel(mixed).norm() - 1.0) < kTol);
}

TEST_CASE("enumerations are complete and duplicate-free") {
    const auto fives = enumerate_five_qubit_specs(CharlieBasis::computational());
    CHECK(fives.size() == 144);
    std::set<std::string> seen;
    bool hasCaoAn = false;
    for (const auto& s : fives) {
        CHECK(s.psi1 != s.psi3);
        CHECK(s.psi2 != s.psi4);
        seen.insert(to_string(s));
        hasCaoAn = hasCaoAn ||
                   (s.psi1 == BellKind::PsiPlus && s.psi2 == BellKind::PsiPlus &&
                    s.psi3 == BellKind::PsiMinus && s.psi4 == BellKind::PsiMinus);
    }
    CHECK(seen.size() == 144);
    CHECK(hasCaoAn);

    for (auto family : {GhzFamily::LowAncilla, GhzFamily::HighAncilla}) {
        const auto sevens = enumerate_seven_qubit_specs(family, CharlieBasis::computational());
        CHECK(sevens.size() == 144);
        for (const auto& s : sevens) {
            CHECK(family_of(s.ghz1) == family);
            CHECK(family_of(s.ghz2) == family);
        }
    }
}

TEST_CASE("spec strings round-trip") {
    CHECK(to_string(noise_study_preset()) == "psi+,psi+,phi-,phi-;+;comp");
    CHECK(to_string(cao_an_preset()) == "psi+,psi+,psi-,psi-;+;pm");

    for (const auto& text : {"psi+,psi+,phi-,phi-;+;comp", "phi+,psi-,psi+,phi-;-;pm"}) {
        const auto spec = parse_five_qubit_spec(text);
        CHECK(to_string(spec) == text);
    }

    const auto withAngles = parse_five_qubit_spec(
        "psi+,phi+,phi-,psi-;+;angles(0.69999999999999996,1.2)");
    CHECK(to_string(withAngles) ==
          "psi+,phi+,phi-,psi-;+;angles(0.69999999999999996,1.2)");
    withAngles.charlie.validate();

    const std::string sevenText = "ghz0+,ghz1-,ghz1+,ghz0-;+;comp";
    CHECK(to_string(parse_seven_qubit_spec(sevenText)) == sevenText);

    CHECK_THROWS_AS(parse_five_qubit_spec("psi+,psi+;+;comp"), std::invalid_argument);
    CHECK_THROWS_AS(parse_five_qubit_spec("psi+,psi+,psi+,phi-;+;comp"), std::invalid_argument);
    CHECK_THROWS_AS(parse_five_qubit_spec("psi+,psi+,phi-,phi-;+;nope"), std::invalid_argument);
    CHECK_THROWS_AS(ghz_from_string("ghz4+"), std::invalid_argument);
}

TEST_CASE("charlie basis from angles is orthonormal") {
    for (double alpha : {0.0, 0.4, 1.1})
        for (double beta : {0.0, 2.0, 5.5})
            CharlieBasis::from_angles(alpha, beta).validate();
}
