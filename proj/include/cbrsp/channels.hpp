#pragma once

#include "cbrsp/qmath.hpp"

#include <string>
#include <vector>

// Entangled resource states: Bell pairs, the eight GHZ variants, the 5-qubit
// bidirectional channel family and the 7-qubit joint-preparation families.
//
// Bell labels follow the ladder convention used throughout this project:
//   psi+- = (|00> +- |11>)/sqrt2,  phi+- = (|01> +- |10>)/sqrt2.
// Mapping to the textbook names: psi+ = Phi+, psi- = Phi-, phi+ = Psi+,
// phi- = Psi-.

namespace cbrsp::channels {

using qmath::cplx;
using qmath::StateVector;

enum class BellKind { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

constexpr std::array<BellKind, 4> kAllBellKinds = {BellKind::PsiPlus, BellKind::PsiMinus,
                                                   BellKind::PhiPlus, BellKind::PhiMinus};

/// GHZ^{x,sign} = (|x as 3 bits> + sign * |complement>)/sqrt2 with x in 0..3.
struct GhzKind {
    int x = 0;
    int sign = +1;

    friend bool operator==(const GhzKind&, const GhzKind&) = default;
};

enum class GhzFamily { LowAncilla, HighAncilla };

GhzFamily family_of(const GhzKind& kind);

/// The controller's measurement basis {|a>, |b>}, an orthonormal pair.
struct CharlieBasis {
    std::array<cplx, 2> a;
    std::array<cplx, 2> b;
    std::string label; // canonical token used in spec strings

    static CharlieBasis computational(); // a=|0>, b=|1>   ("comp")
    static CharlieBasis plus_minus();    // a=|+>, b=|->   ("pm")
    /// a = cos(alpha)|0> + e^{i beta} sin(alpha)|1>, b the orthogonal partner.
    static CharlieBasis from_angles(double alpha, double beta);

    void validate() const; // orthonormality within 1e-12
    qmath::SingleQubitBasis basis() const;
};

/// (|psi1>|psi2>|a> + sign |psi3>|psi4>|b>)/sqrt2 on qubits S1 R1 S2 R2 C1.
/// Valid only when psi1 != psi3 and psi2 != psi4.
struct FiveQubitChannelSpec {
    BellKind psi1, psi2, psi3, psi4;
    int relativeSign = +1;
    CharlieBasis charlie = CharlieBasis::computational();

    void validate() const;
};

/// (|GHZ1>|GHZ2>|a> + sign |GHZ3>|GHZ4>|b>)/sqrt2 on S1 S1' R1 S2 S2' R2 C1.
/// Valid only when ghz1 != ghz3 and ghz2 != ghz4.
struct SevenQubitChannelSpec {
    GhzKind ghz1, ghz2, ghz3, ghz4;
    int relativeSign = +1;
    CharlieBasis charlie = CharlieBasis::computational();

    void validate() const;
};

StateVector make_bell(BellKind kind);
StateVector make_ghz(const GhzKind& kind); // qubit order S, S', R

/// The GHZ kind produced by CNOT_{S->S'} (bell_{SR} (x) |ancilla>_{S'}).
GhzKind ghz_from_bell_and_ancilla(BellKind bell, int ancilla);

StateVector make_five_qubit_channel(const FiveQubitChannelSpec& spec);
StateVector make_seven_qubit_channel(const SevenQubitChannelSpec& spec);

/// The 7-qubit spec obtained by appending |ancilla,ancilla> and applying the
/// two CNOTs to a 5-qubit channel.
SevenQubitChannelSpec seven_from_five(const FiveQubitChannelSpec& spec, int ancilla);

/// All 144 valid ordered Bell assignments for a fixed controller basis
/// (relative sign fixed to +).
std::vector<FiveQubitChannelSpec> enumerate_five_qubit_specs(const CharlieBasis& charlie);

/// All 144 valid ordered GHZ assignments within one family.
std::vector<SevenQubitChannelSpec> enumerate_seven_qubit_specs(GhzFamily family,
                                                               const CharlieBasis& charlie);

// Canonical text forms, e.g. "psi+,psi+,phi-,phi-;+;comp" and
// "ghz0+,ghz1-,ghz1+,ghz0-;+;comp". Round-trip exactly.
std::string to_string(BellKind kind);
std::string to_string(const GhzKind& kind);
std::string to_string(const FiveQubitChannelSpec& spec);
std::string to_string(const SevenQubitChannelSpec& spec);
BellKind bell_from_string(const std::string& token);
GhzKind ghz_from_string(const std::string& token);
CharlieBasis charlie_from_string(const std::string& token);
FiveQubitChannelSpec parse_five_qubit_spec(const std::string& text);
SevenQubitChannelSpec parse_seven_qubit_spec(const std::string& text);

// Named presets.
FiveQubitChannelSpec cao_an_preset();      // psi+,psi+,psi-,psi-;+;pm
FiveQubitChannelSpec noise_study_preset(); // psi+,psi+,phi-,phi-;+;comp

} // namespace cbrsp::channels
