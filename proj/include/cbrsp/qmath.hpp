#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

// Dense complex linear algebra for small multi-qubit systems (<= 10 qubits).
//
// Index convention used everywhere: qubit 0 is the leftmost ket label and the
// most significant bit of the basis index, so |q0 q1 ... q_{n-1}> has index
// q0*2^{n-1} + ... + q_{n-1}.

namespace cbrsp::qmath {

using cplx = std::complex<double>;

// Centralized tolerances.
namespace tol {
inline constexpr double kAlgebra = 1e-12;      // algebraic identities, norms, traces
inline constexpr double kPsdFloor = -1e-10;    // eigenvalue floor for positivity checks
inline constexpr double kOutcomeFloor = 1e-15; // forced measurement outcomes below this fail
inline constexpr double kClosedForm = 1e-9;    // simulation vs closed-form comparison
} // namespace tol

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    /// Bounds-checked element access.
    cplx& at(std::size_t r, std::size_t c);
    const cplx& at(std::size_t r, std::size_t c) const;

    const cplx* data() const noexcept { return entries_.data(); }
    cplx* data() noexcept { return entries_.data(); }
    std::span<const cplx> entries() const noexcept { return entries_; }

    ComplexMatrix adjoint() const;
    cplx trace() const;

    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(cplx s) const;
    ComplexMatrix& operator+=(const ComplexMatrix& rhs);

    double max_abs() const;
    double max_abs_diff(const ComplexMatrix& other) const;
    bool is_hermitian(double tolerance = tol::kAlgebra) const;
    bool is_unitary(double tolerance = tol::kAlgebra) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigenvalues of a Hermitian matrix (ascending), via cyclic Jacobi rotations.
std::vector<double> hermitian_eigenvalues(ComplexMatrix a);

// Common single- and two-qubit operators.
namespace ops {
ComplexMatrix identity2();
ComplexMatrix pauli_x();
ComplexMatrix pauli_z();
ComplexMatrix i_pauli_y(); // [[0,1],[-1,0]] = X*Z
ComplexMatrix cnot();      // control = first (most significant) qubit
} // namespace ops

class StateVector {
public:
    /// |0...0> on numQubits qubits.
    explicit StateVector(std::size_t numQubits);

    /// Wraps amplitudes that are already normalized (sum |a|^2 = 1 within 1e-12).
    static StateVector from_amplitudes(std::size_t numQubits, std::vector<cplx> amps);
    /// Rescales the amplitudes to unit norm; throws on (near-)zero vectors.
    static StateVector normalized(std::size_t numQubits, std::vector<cplx> amps);
    static StateVector basis_state(std::size_t numQubits, std::size_t index);
    static StateVector single_qubit(cplx amp0, cplx amp1);

    std::size_t num_qubits() const noexcept { return numQubits_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const noexcept { return amps_; }
    cplx amplitude(std::size_t i) const;
    double norm() const;

private:
    StateVector(std::size_t numQubits, std::vector<cplx> amps, bool checked);
    std::size_t numQubits_ = 0;
    std::vector<cplx> amps_;
};

StateVector tensor_product(const StateVector& a, const StateVector& b);
cplx inner_product(const StateVector& a, const StateVector& b); // <a|b>

/// Reorders qubits: result qubit i is input qubit newOrder[i].
StateVector permute_qubits(const StateVector& state, std::span<const std::size_t> newOrder);

class DensityMatrix {
public:
    static DensityMatrix pure(const StateVector& psi);
    /// Validates hermiticity (1e-12) and trace; the normalized flag is derived
    /// from the trace (|tr - 1| <= 1e-12). Unnormalized matrices must have
    /// trace in (0, 1].
    static DensityMatrix from_matrix(std::size_t numQubits, ComplexMatrix m);

    std::size_t num_qubits() const noexcept { return numQubits_; }
    std::size_t dim() const noexcept { return matrix_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    bool normalized() const noexcept { return normalized_; }
    double trace_real() const;

    /// Explicit normalization step (never performed implicitly).
    DensityMatrix normalized_copy() const;

    /// Smallest eigenvalue; positivity holds when this is >= tol::kPsdFloor.
    double min_eigenvalue() const;

private:
    DensityMatrix(std::size_t numQubits, ComplexMatrix m, bool normalized);
    std::size_t numQubits_ = 0;
    ComplexMatrix matrix_;
    bool normalized_ = true;
};

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

/// An orthonormal pair of single-qubit states (checked to 1e-12).
struct SingleQubitBasis {
    std::array<cplx, 2> first;
    std::array<cplx, 2> second;

    static SingleQubitBasis make(std::array<cplx, 2> first, std::array<cplx, 2> second);
    static SingleQubitBasis computational();
    static SingleQubitBasis plus_minus();

    ComplexMatrix vector_matrix(int which) const;  // 2x1 column
    ComplexMatrix projector(int which) const;      // |v><v|
};

StateVector apply_on_qubits(const StateVector& state, const ComplexMatrix& op,
                            std::span<const std::size_t> targets);
DensityMatrix apply_on_qubits(const DensityMatrix& rho, const ComplexMatrix& op,
                              std::span<const std::size_t> targets);

/// Builds the full 2^n x 2^n matrix of op acting on the listed qubits.
ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const std::size_t> targets,
                             std::size_t numQubits);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

struct MeasurementInfo {
    int outcome;         // 0 = first basis vector, 1 = second
    double probability;  // exact branch probability
    bool renormalized;   // post state has been renormalized
};

struct StateMeasurement {
    MeasurementInfo info;
    StateVector post;
};

struct DensityMeasurement {
    MeasurementInfo info;
    DensityMatrix post;
};

/// Projective measurement of one qubit in the given orthonormal basis.
/// With forcedOutcome, the stated branch is taken and its exact probability
/// returned; a forced branch with probability < 1e-15 throws. Without it, the
/// outcome is sampled using rngSeed (required for sampling).
StateMeasurement measure_in_basis(const StateVector& state, std::size_t qubit,
                                  const SingleQubitBasis& basis,
                                  std::optional<int> forcedOutcome = std::nullopt,
                                  std::optional<std::uint64_t> rngSeed = std::nullopt);
DensityMeasurement measure_in_basis(const DensityMatrix& rho, std::size_t qubit,
                                    const SingleQubitBasis& basis,
                                    std::optional<int> forcedOutcome = std::nullopt,
                                    std::optional<std::uint64_t> rngSeed = std::nullopt);

/// F = <target| rho |target>, for a normalized target and normalized rho.
double fidelity_pure_vs_mixed(const StateVector& target, const DensityMatrix& rho);

/// |<a|b>|^2 for pure states.
double fidelity_pure(const StateVector& a, const StateVector& b);

} // namespace cbrsp::qmath
