#include "cbrsp/channels.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cbrsp::channels {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

int parse_sign(const std::string& token) {
    if (token == "+")
        return +1;
    if (token == "-")
        return -1;
    throw std::invalid_argument("bad sign token '" + token + "'");
}

} // namespace

GhzFamily family_of(const GhzKind& kind) {
    return kind.x < 2 ? GhzFamily::LowAncilla : GhzFamily::HighAncilla;
}

CharlieBasis CharlieBasis::computational() {
    return CharlieBasis{{cplx{1, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{1, 0}}, "comp"};
}

CharlieBasis CharlieBasis::plus_minus() {
    return CharlieBasis{{cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}},
                        {cplx{kInvSqrt2, 0}, cplx{-kInvSqrt2, 0}},
                        "pm"};
}

CharlieBasis CharlieBasis::from_angles(double alpha, double beta) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "angles(%.17g,%.17g)", alpha, beta);
    const cplx phase = std::polar(1.0, beta);
    return CharlieBasis{{cplx{std::cos(alpha), 0}, phase * std::sin(alpha)},
                        {-std::conj(phase) * std::sin(alpha), cplx{std::cos(alpha), 0}},
                        buf};
}

void CharlieBasis::validate() const {
    qmath::SingleQubitBasis::make(a, b); // throws unless orthonormal
}

qmath::SingleQubitBasis CharlieBasis::basis() const {
    return qmath::SingleQubitBasis::make(a, b);
}

void FiveQubitChannelSpec::validate() const {
    if (psi1 == psi3 || psi2 == psi4)
        throw std::invalid_argument(
            "invalid channel spec: requires psi1 != psi3 and psi2 != psi4");
    charlie.validate();
}

void SevenQubitChannelSpec::validate() const {
    if (ghz1.x < 0 || ghz1.x > 3 || ghz2.x < 0 || ghz2.x > 3 || ghz3.x < 0 || ghz3.x > 3 ||
        ghz4.x < 0 || ghz4.x > 3)
        throw std::invalid_argument("GHZ index out of range");
    if (ghz1 == ghz3 || ghz2 == ghz4)
        throw std::invalid_argument(
            "invalid channel spec: requires ghz1 != ghz3 and ghz2 != ghz4");
    charlie.validate();
}

StateVector make_bell(BellKind kind) {
    std::vector<cplx> amps(4, cplx{0, 0});
    switch (kind) {
    case BellKind::PsiPlus:
        amps[0] = kInvSqrt2;
        amps[3] = kInvSqrt2;
        break;
    case BellKind::PsiMinus:
        amps[0] = kInvSqrt2;
        amps[3] = -kInvSqrt2;
        break;
    case BellKind::PhiPlus:
        amps[1] = kInvSqrt2;
        amps[2] = kInvSqrt2;
        break;
    case BellKind::PhiMinus:
        amps[1] = kInvSqrt2;
        amps[2] = -kInvSqrt2;
        break;
    }
    return StateVector::from_amplitudes(2, std::move(amps));
}

StateVector make_ghz(const GhzKind& kind) {
    if (kind.x < 0 || kind.x > 3)
        throw std::invalid_argument("GHZ index out of range");
    std::vector<cplx> amps(8, cplx{0, 0});
    amps[static_cast<std::size_t>(kind.x)] = kInvSqrt2;
    amps[static_cast<std::size_t>(7 - kind.x)] = kind.sign > 0 ? kInvSqrt2 : -kInvSqrt2;
    return StateVector::from_amplitudes(3, std::move(amps));
}

GhzKind ghz_from_bell_and_ancilla(BellKind bell, int ancilla) {
    if (ancilla != 0 && ancilla != 1)
        throw std::invalid_argument("ancilla must be 0 or 1");
    const bool phiLike = bell == BellKind::PhiPlus || bell == BellKind::PhiMinus;
    const bool minus = bell == BellKind::PsiMinus || bell == BellKind::PhiMinus;
    return GhzKind{(phiLike ? 1 : 0) + 2 * ancilla, minus ? -1 : +1};
}

namespace {

StateVector two_branch_superposition(const StateVector& branchA, const StateVector& branchB,
                                     int sign) {
    std::vector<cplx> amps(branchA.dim());
    const double s = sign > 0 ? kInvSqrt2 : -kInvSqrt2;
    for (std::size_t i = 0; i < amps.size(); ++i)
        amps[i] = kInvSqrt2 * branchA.amplitudes()[i] + s * branchB.amplitudes()[i];
    return StateVector::from_amplitudes(branchA.num_qubits(), std::move(amps));
}

StateVector charlie_ket(const std::array<cplx, 2>& v) {
    return StateVector::single_qubit(v[0], v[1]);
}

} // namespace

StateVector make_five_qubit_channel(const FiveQubitChannelSpec& spec) {
    spec.validate();
    const StateVector first =
        tensor_product(tensor_product(make_bell(spec.psi1), make_bell(spec.psi2)),
                       charlie_ket(spec.charlie.a));
    const StateVector second =
        tensor_product(tensor_product(make_bell(spec.psi3), make_bell(spec.psi4)),
                       charlie_ket(spec.charlie.b));
    return two_branch_superposition(first, second, spec.relativeSign);
}

StateVector make_seven_qubit_channel(const SevenQubitChannelSpec& spec) {
    spec.validate();
    const StateVector first =
        tensor_product(tensor_product(make_ghz(spec.ghz1), make_ghz(spec.ghz2)),
                       charlie_ket(spec.charlie.a));
    const StateVector second =
        tensor_product(tensor_product(make_ghz(spec.ghz3), make_ghz(spec.ghz4)),
                       charlie_ket(spec.charlie.b));
    return two_branch_superposition(first, second, spec.relativeSign);
}

SevenQubitChannelSpec seven_from_five(const FiveQubitChannelSpec& spec, int ancilla) {
    spec.validate();
    return SevenQubitChannelSpec{ghz_from_bell_and_ancilla(spec.psi1, ancilla),
                                 ghz_from_bell_and_ancilla(spec.psi2, ancilla),
                                 ghz_from_bell_and_ancilla(spec.psi3, ancilla),
                                 ghz_from_bell_and_ancilla(spec.psi4, ancilla),
                                 spec.relativeSign, spec.charlie};
}

std::vector<FiveQubitChannelSpec> enumerate_five_qubit_specs(const CharlieBasis& charlie) {
    std::vector<FiveQubitChannelSpec> specs;
    specs.reserve(144);
    for (BellKind p1 : kAllBellKinds)
        for (BellKind p3 : kAllBellKinds) {
            if (p1 == p3)
                continue;
            for (BellKind p2 : kAllBellKinds)
                for (BellKind p4 : kAllBellKinds) {
                    if (p2 == p4)
                        continue;
                    specs.push_back(FiveQubitChannelSpec{p1, p2, p3, p4, +1, charlie});
                }
        }
    return specs;
}

std::vector<SevenQubitChannelSpec> enumerate_seven_qubit_specs(GhzFamily family,
                                                               const CharlieBasis& charlie) {
    std::vector<GhzKind> kinds;
    const int base = family == GhzFamily::LowAncilla ? 0 : 2;
    for (int x = base; x < base + 2; ++x)
        for (int sign : {+1, -1})
            kinds.push_back(GhzKind{x, sign});

    std::vector<SevenQubitChannelSpec> specs;
    specs.reserve(144);
    for (const GhzKind& g1 : kinds)
        for (const GhzKind& g3 : kinds) {
            if (g1 == g3)
                continue;
            for (const GhzKind& g2 : kinds)
                for (const GhzKind& g4 : kinds) {
                    if (g2 == g4)
                        continue;
                    specs.push_back(SevenQubitChannelSpec{g1, g2, g3, g4, +1, charlie});
                }
        }
    return specs;
}

std::string to_string(BellKind kind) {
    switch (kind) {
    case BellKind::PsiPlus:
        return "psi+";
    case BellKind::PsiMinus:
        return "psi-";
    case BellKind::PhiPlus:
        return "phi+";
    case BellKind::PhiMinus:
        return "phi-";
    }
    throw std::logic_error("unreachable");
}

std::string to_string(const GhzKind& kind) {
    return "ghz" + std::to_string(kind.x) + (kind.sign > 0 ? "+" : "-");
}

std::string to_string(const FiveQubitChannelSpec& spec) {
    return to_string(spec.psi1) + "," + to_string(spec.psi2) + "," + to_string(spec.psi3) + "," +
           to_string(spec.psi4) + ";" + (spec.relativeSign > 0 ? "+" : "-") + ";" +
           spec.charlie.label;
}

std::string to_string(const SevenQubitChannelSpec& spec) {
    return to_string(spec.ghz1) + "," + to_string(spec.ghz2) + "," + to_string(spec.ghz3) + "," +
           to_string(spec.ghz4) + ";" + (spec.relativeSign > 0 ? "+" : "-") + ";" +
           spec.charlie.label;
}

BellKind bell_from_string(const std::string& token) {
    if (token == "psi+")
        return BellKind::PsiPlus;
    if (token == "psi-")
        return BellKind::PsiMinus;
    if (token == "phi+")
        return BellKind::PhiPlus;
    if (token == "phi-")
        return BellKind::PhiMinus;
    throw std::invalid_argument("bad Bell token '" + token + "'");
}

GhzKind ghz_from_string(const std::string& token) {
    if (token.size() != 5 || token.substr(0, 3) != "ghz")
        throw std::invalid_argument("bad GHZ token '" + token + "'");
    const int x = token[3] - '0';
    if (x < 0 || x > 3 || (token[4] != '+' && token[4] != '-'))
        throw std::invalid_argument("bad GHZ token '" + token + "'");
    return GhzKind{x, token[4] == '+' ? +1 : -1};
}

CharlieBasis charlie_from_string(const std::string& token) {
    if (token == "comp")
        return CharlieBasis::computational();
    if (token == "pm")
        return CharlieBasis::plus_minus();
    double alpha = 0.0, beta = 0.0;
    if (std::sscanf(token.c_str(), "angles(%lg,%lg)", &alpha, &beta) == 2)
        return CharlieBasis::from_angles(alpha, beta);
    throw std::invalid_argument("bad controller-basis token '" + token + "'");
}

FiveQubitChannelSpec parse_five_qubit_spec(const std::string& text) {
    const auto sections = split(text, ';');
    if (sections.size() != 3)
        throw std::invalid_argument("channel spec must have three ';'-separated sections");
    const auto bells = split(sections[0], ',');
    if (bells.size() != 4)
        throw std::invalid_argument("channel spec must list four Bell states");
    FiveQubitChannelSpec spec{bell_from_string(bells[0]), bell_from_string(bells[1]),
                              bell_from_string(bells[2]), bell_from_string(bells[3]),
                              parse_sign(sections[1]), charlie_from_string(sections[2])};
    spec.validate();
    return spec;
}

SevenQubitChannelSpec parse_seven_qubit_spec(const std::string& text) {
    const auto sections = split(text, ';');
    if (sections.size() != 3)
        throw std::invalid_argument("channel spec must have three ';'-separated sections");
    const auto ghzs = split(sections[0], ',');
    if (ghzs.size() != 4)
        throw std::invalid_argument("channel spec must list four GHZ states");
    SevenQubitChannelSpec spec{ghz_from_string(ghzs[0]), ghz_from_string(ghzs[1]),
                               ghz_from_string(ghzs[2]), ghz_from_string(ghzs[3]),
                               parse_sign(sections[1]), charlie_from_string(sections[2])};
    spec.validate();
    return spec;
}

FiveQubitChannelSpec cao_an_preset() {
    return FiveQubitChannelSpec{BellKind::PsiPlus, BellKind::PsiPlus, BellKind::PsiMinus,
                                BellKind::PsiMinus, +1, CharlieBasis::plus_minus()};
}

FiveQubitChannelSpec noise_study_preset() {
    return FiveQubitChannelSpec{BellKind::PsiPlus, BellKind::PsiPlus, BellKind::PhiMinus,
                                BellKind::PhiMinus, +1, CharlieBasis::computational()};
}

} // namespace cbrsp::channels
