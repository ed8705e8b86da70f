#include "cbrsp/qmath.hpp"

#include "cbrsp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace cbrsp::qmath {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void check_targets(std::size_t numQubits, std::span<const std::size_t> targets) {
    std::vector<bool> seen(numQubits, false);
    for (std::size_t t : targets) {
        if (t >= numQubits)
            throw std::out_of_range("target qubit " + std::to_string(t) + " out of range");
        if (seen[t])
            throw std::invalid_argument("duplicate target qubit " + std::to_string(t));
        seen[t] = true;
    }
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw std::invalid_argument("entry count does not match matrix shape");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw std::invalid_argument("ragged initializer for ComplexMatrix");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.entries_[i * n + i] = cplx{1.0, 0.0};
    return m;
}

cplx& ComplexMatrix::at(std::size_t r, std::size_t c) {
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("ComplexMatrix index out of range");
    return entries_[r * cols_ + c];
}

const cplx& ComplexMatrix::at(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("ComplexMatrix index out of range");
    return entries_[r * cols_ + c];
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out.entries_[c * rows_ + r] = std::conj(entries_[r * cols_ + c]);
    return out;
}

cplx ComplexMatrix::trace() const {
    if (rows_ != cols_)
        throw std::invalid_argument("trace of a non-square matrix");
    cplx t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i)
        t += entries_[i * cols_ + i];
    return t;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_)
        throw std::invalid_argument("matrix product shape mismatch");
    ComplexMatrix out(rows_, rhs.cols_);
    kernels::matmul(entries_.data(), rhs.entries_.data(), out.entries_.data(),
                    rows_, cols_, rhs.cols_);
    return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    ComplexMatrix out = *this;
    out += rhs;
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("matrix difference shape mismatch");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        out.entries_[i] -= rhs.entries_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator*(cplx s) const {
    ComplexMatrix out = *this;
    for (auto& e : out.entries_)
        e *= s;
    return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("matrix sum shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i)
        entries_[i] += rhs.entries_[i];
    return *this;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_)
        m = std::max(m, std::abs(e));
    return m;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("matrix comparison shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        m = std::max(m, std::abs(entries_[i] - other.entries_[i]));
    return m;
}

bool ComplexMatrix::is_hermitian(double tolerance) const {
    if (rows_ != cols_)
        return false;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = r; c < cols_; ++c)
            if (std::abs(entries_[r * cols_ + c] - std::conj(entries_[c * cols_ + r])) > tolerance)
                return false;
    return true;
}

bool ComplexMatrix::is_unitary(double tolerance) const {
    if (rows_ != cols_)
        return false;
    return (adjoint() * *this).max_abs_diff(identity(rows_)) <= tolerance;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    kernels::kron(a.data(), a.rows(), a.cols(), b.data(), b.rows(), b.cols(), out.data());
    return out;
}

std::vector<double> hermitian_eigenvalues(ComplexMatrix a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("eigenvalues of a non-square matrix");
    if (!a.is_hermitian(1e-10 * std::max(1.0, a.max_abs())))
        throw std::invalid_argument("matrix is not Hermitian");
    const std::size_t n = a.rows();
    cplx* m = a.data();
    const double scale = std::max(1.0, a.max_abs());

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off = std::max(off, std::abs(m[p * n + q]));
        if (off <= 1e-14 * scale)
            break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx alpha = m[p * n + q];
                const double mag = std::abs(alpha);
                if (mag <= 1e-300)
                    continue;
                const double phi = std::arg(alpha);
                const double tau = (m[p * n + p].real() - m[q * n + q].real()) / (2.0 * mag);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                const cplx phase = std::polar(1.0, phi);
                // columns p,q of A <- A U, then rows p,q of A <- U^dagger A
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = m[k * n + p], akq = m[k * n + q];
                    m[k * n + p] = c * akp + s * std::conj(phase) * akq;
                    m[k * n + q] = -s * akp + c * std::conj(phase) * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = m[p * n + k], aqk = m[q * n + k];
                    m[p * n + k] = c * apk + s * phase * aqk;
                    m[q * n + k] = -s * apk + c * phase * aqk;
                }
            }
        }
    }
    std::vector<double> eigs(n);
    for (std::size_t i = 0; i < n; ++i)
        eigs[i] = m[i * n + i].real();
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

namespace ops {

ComplexMatrix identity2() { return ComplexMatrix::identity(2); }

ComplexMatrix pauli_x() {
    return ComplexMatrix{{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{0, 0}}};
}

ComplexMatrix pauli_z() {
    return ComplexMatrix{{cplx{1, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{-1, 0}}};
}

ComplexMatrix i_pauli_y() {
    return ComplexMatrix{{cplx{0, 0}, cplx{1, 0}}, {cplx{-1, 0}, cplx{0, 0}}};
}

ComplexMatrix cnot() {
    ComplexMatrix m(4, 4);
    m.at(0, 0) = 1;
    m.at(1, 1) = 1;
    m.at(2, 3) = 1;
    m.at(3, 2) = 1;
    return m;
}

} // namespace ops

StateVector::StateVector(std::size_t numQubits, std::vector<cplx> amps, bool)
    : numQubits_(numQubits), amps_(std::move(amps)) {}

StateVector::StateVector(std::size_t numQubits)
    : numQubits_(numQubits), amps_(std::size_t{1} << numQubits, cplx{0.0, 0.0}) {
    amps_[0] = cplx{1.0, 0.0};
}

StateVector StateVector::from_amplitudes(std::size_t numQubits, std::vector<cplx> amps) {
    if (amps.size() != (std::size_t{1} << numQubits))
        throw std::invalid_argument("amplitude count does not match qubit count");
    double n2 = 0.0;
    for (const auto& a : amps)
        n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > tol::kAlgebra)
        throw std::invalid_argument("state vector is not normalized");
    return StateVector(numQubits, std::move(amps), true);
}

StateVector StateVector::normalized(std::size_t numQubits, std::vector<cplx> amps) {
    if (amps.size() != (std::size_t{1} << numQubits))
        throw std::invalid_argument("amplitude count does not match qubit count");
    double n2 = 0.0;
    for (const auto& a : amps)
        n2 += std::norm(a);
    if (n2 < tol::kOutcomeFloor)
        throw std::domain_error("cannot normalize a zero state vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amps)
        a *= inv;
    return StateVector(numQubits, std::move(amps), true);
}

StateVector StateVector::basis_state(std::size_t numQubits, std::size_t index) {
    std::vector<cplx> amps(std::size_t{1} << numQubits, cplx{0.0, 0.0});
    amps.at(index) = cplx{1.0, 0.0};
    return StateVector(numQubits, std::move(amps), true);
}

StateVector StateVector::single_qubit(cplx amp0, cplx amp1) {
    return from_amplitudes(1, {amp0, amp1});
}

cplx StateVector::amplitude(std::size_t i) const {
    if (i >= amps_.size())
        throw std::out_of_range("amplitude index out of range");
    return amps_[i];
}

double StateVector::norm() const {
    double n2 = 0.0;
    for (const auto& a : amps_)
        n2 += std::norm(a);
    return std::sqrt(n2);
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    std::vector<cplx> out(a.dim() * b.dim());
    kernels::kron(a.amplitudes().data(), a.dim(), 1, b.amplitudes().data(), b.dim(), 1, out.data());
    return StateVector::from_amplitudes(a.num_qubits() + b.num_qubits(), std::move(out));
}

cplx inner_product(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("inner product dimension mismatch");
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i)
        acc += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
    return acc;
}

StateVector permute_qubits(const StateVector& state, std::span<const std::size_t> newOrder) {
    const std::size_t n = state.num_qubits();
    if (newOrder.size() != n)
        throw std::invalid_argument("permutation size mismatch");
    check_targets(n, newOrder);
    std::vector<cplx> out(state.dim());
    for (std::size_t i = 0; i < state.dim(); ++i) {
        std::size_t j = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t bit = (i >> (n - 1 - newOrder[k])) & 1u;
            j |= bit << (n - 1 - k);
        }
        out[j] = state.amplitudes()[i];
    }
    return StateVector::from_amplitudes(n, std::move(out));
}

DensityMatrix::DensityMatrix(std::size_t numQubits, ComplexMatrix m, bool normalized)
    : numQubits_(numQubits), matrix_(std::move(m)), normalized_(normalized) {}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    const std::size_t d = psi.dim();
    ComplexMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            m.at(r, c) = psi.amplitudes()[r] * std::conj(psi.amplitudes()[c]);
    return DensityMatrix(psi.num_qubits(), std::move(m), true);
}

DensityMatrix DensityMatrix::from_matrix(std::size_t numQubits, ComplexMatrix m) {
    if (m.rows() != m.cols() || m.rows() != (std::size_t{1} << numQubits))
        throw std::invalid_argument("density matrix dimension mismatch");
    if (!is_power_of_two(m.rows()))
        throw std::invalid_argument("density matrix dimension must be a power of two");
    if (!m.is_hermitian(tol::kAlgebra * std::max(1.0, m.max_abs())))
        throw std::invalid_argument("density matrix is not Hermitian");
    const cplx tr = m.trace();
    if (std::abs(tr.imag()) > tol::kAlgebra)
        throw std::invalid_argument("density matrix trace is not real");
    if (tr.real() <= 0.0 || tr.real() > 1.0 + tol::kAlgebra)
        throw std::invalid_argument("density matrix trace outside (0, 1]");
    const bool normalized = std::abs(tr.real() - 1.0) <= tol::kAlgebra;
    return DensityMatrix(numQubits, std::move(m), normalized);
}

double DensityMatrix::trace_real() const { return matrix_.trace().real(); }

DensityMatrix DensityMatrix::normalized_copy() const {
    const double tr = trace_real();
    if (tr < tol::kOutcomeFloor)
        throw std::domain_error("cannot normalize a density matrix with vanishing trace");
    return DensityMatrix(numQubits_, matrix_ * cplx{1.0 / tr, 0.0}, true);
}

double DensityMatrix::min_eigenvalue() const {
    auto eigs = hermitian_eigenvalues(matrix_);
    return eigs.front();
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix::from_matrix(a.num_qubits() + b.num_qubits(),
                                      tensor_product(a.matrix(), b.matrix()));
}

SingleQubitBasis SingleQubitBasis::make(std::array<cplx, 2> first, std::array<cplx, 2> second) {
    const double n1 = std::norm(first[0]) + std::norm(first[1]);
    const double n2 = std::norm(second[0]) + std::norm(second[1]);
    const cplx overlap = std::conj(first[0]) * second[0] + std::conj(first[1]) * second[1];
    if (std::abs(n1 - 1.0) > tol::kAlgebra || std::abs(n2 - 1.0) > tol::kAlgebra ||
        std::abs(overlap) > tol::kAlgebra)
        throw std::invalid_argument("basis pair is not orthonormal");
    return SingleQubitBasis{first, second};
}

SingleQubitBasis SingleQubitBasis::computational() {
    return SingleQubitBasis{{cplx{1, 0}, cplx{0, 0}}, {cplx{0, 0}, cplx{1, 0}}};
}

SingleQubitBasis SingleQubitBasis::plus_minus() {
    const double s = 1.0 / std::sqrt(2.0);
    return SingleQubitBasis{{cplx{s, 0}, cplx{s, 0}}, {cplx{s, 0}, cplx{-s, 0}}};
}

ComplexMatrix SingleQubitBasis::vector_matrix(int which) const {
    const auto& v = which == 0 ? first : second;
    ComplexMatrix m(2, 1);
    m.at(0, 0) = v[0];
    m.at(1, 0) = v[1];
    return m;
}

ComplexMatrix SingleQubitBasis::projector(int which) const {
    const auto& v = which == 0 ? first : second;
    ComplexMatrix m(2, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            m.at(r, c) = v[r] * std::conj(v[c]);
    return m;
}

StateVector apply_on_qubits(const StateVector& state, const ComplexMatrix& op,
                            std::span<const std::size_t> targets) {
    check_targets(state.num_qubits(), targets);
    const std::size_t subDim = std::size_t{1} << targets.size();
    if (op.rows() != subDim || op.cols() != subDim)
        throw std::invalid_argument("operator dimension does not match target count");
    std::vector<cplx> amps = state.amplitudes();
    kernels::apply_operator_statevector(amps.data(), state.num_qubits(), op.data(),
                                        targets.data(), targets.size());
    return StateVector::from_amplitudes(state.num_qubits(), std::move(amps));
}

DensityMatrix apply_on_qubits(const DensityMatrix& rho, const ComplexMatrix& op,
                              std::span<const std::size_t> targets) {
    check_targets(rho.num_qubits(), targets);
    const std::size_t subDim = std::size_t{1} << targets.size();
    if (op.rows() != subDim || op.cols() != subDim)
        throw std::invalid_argument("operator dimension does not match target count");
    if (targets.size() == 1) {
        ComplexMatrix m = rho.matrix();
        const cplx e[4] = {op.data()[0], op.data()[1], op.data()[2], op.data()[3]};
        kernels::single_qubit_sandwich(m.data(), rho.num_qubits(), targets[0], e);
        return DensityMatrix::from_matrix(rho.num_qubits(), std::move(m));
    }
    const ComplexMatrix full = embed_operator(op, targets, rho.num_qubits());
    return DensityMatrix::from_matrix(rho.num_qubits(), full * rho.matrix() * full.adjoint());
}

ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const std::size_t> targets,
                             std::size_t numQubits) {
    check_targets(numQubits, targets);
    const std::size_t subDim = std::size_t{1} << targets.size();
    if (op.rows() != subDim || op.cols() != subDim)
        throw std::invalid_argument("operator dimension does not match target count");
    const std::size_t dim = std::size_t{1} << numQubits;
    ComplexMatrix out(dim, dim);
    kernels::embed_operator(op.data(), targets.data(), targets.size(), numQubits, out.data());
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
    if (keep.empty())
        throw std::invalid_argument("partial trace must keep at least one qubit");
    check_targets(rho.num_qubits(), keep);
    const std::size_t outDim = std::size_t{1} << keep.size();
    ComplexMatrix out(outDim, outDim);
    kernels::partial_trace(rho.matrix().data(), rho.num_qubits(), keep.data(), keep.size(),
                           out.data());
    return DensityMatrix::from_matrix(keep.size(), std::move(out));
}

namespace {

int pick_outcome(double p0, double p1, std::optional<int> forced,
                 std::optional<std::uint64_t> seed) {
    if (forced) {
        if (*forced != 0 && *forced != 1)
            throw std::invalid_argument("forced outcome must be 0 or 1");
        if ((*forced == 0 ? p0 : p1) < tol::kOutcomeFloor)
            throw std::domain_error("forced measurement outcome has vanishing probability");
        return *forced;
    }
    if (!seed)
        throw std::invalid_argument("sampled measurement requires an rng seed");
    std::mt19937_64 rng(*seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    return dist(rng) * (p0 + p1) < p0 ? 0 : 1;
}

} // namespace

StateMeasurement measure_in_basis(const StateVector& state, std::size_t qubit,
                                  const SingleQubitBasis& basis,
                                  std::optional<int> forcedOutcome,
                                  std::optional<std::uint64_t> rngSeed) {
    if (qubit >= state.num_qubits())
        throw std::out_of_range("measured qubit out of range");
    const std::size_t n = state.num_qubits();
    const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
    const auto& amps = state.amplitudes();

    // Branch overlaps <v_o | block> for each pair of basis indices.
    double p0 = 0.0, p1 = 0.0;
    for (std::size_t i0 = 0; i0 < amps.size(); ++i0) {
        if (i0 & mask)
            continue;
        const cplx a = amps[i0], b = amps[i0 | mask];
        p0 += std::norm(std::conj(basis.first[0]) * a + std::conj(basis.first[1]) * b);
        p1 += std::norm(std::conj(basis.second[0]) * a + std::conj(basis.second[1]) * b);
    }
    const int outcome = pick_outcome(p0, forcedOutcome, rngSeed, "measurement");
    const double prob = outcome == 0 ? p0 : p1;
    if (prob < tol::kOutcomeFloor)
        throw std::domain_error("sampled branch has vanishing probability");

    const auto& v = outcome == 0 ? basis.first : basis.second;
    std::vector<cplx> post(amps.size());
    const double inv = 1.0 / std::sqrt(prob);
    for (std::size_t i0 = 0; i0 < amps.size(); ++i0) {
        if (i0 & mask)
            continue;
        const cplx c = std::conj(v[0]) * amps[i0] + std::conj(v[1]) * amps[i0 | mask];
        post[i0] = v[0] * c * inv;
        post[i0 | mask] = v[1] * c * inv;
    }
    return StateMeasurement{MeasurementInfo{outcome, prob, true},
                            StateVector::normalized(n, std::move(post))};
}

DensityMeasurement measure_in_basis(const DensityMatrix& rho, std::size_t qubit,
                                    const SingleQubitBasis& basis,
                                    std::optional<int> forcedOutcome,
                                    std::optional<std::uint64_t> rngSeed) {
    if (qubit >= rho.num_qubits())
        throw std::out_of_range("measured qubit out of range");
    auto branch_trace = [&](int which) {
        ComplexMatrix m = rho.matrix();
        const ComplexMatrix p = basis.projector(which);
        const cplx e[4] = {p.data()[0], p.data()[1], p.data()[2], p.data()[3]};
        kernels::single_qubit_sandwich(m.data(), rho.num_qubits(), qubit, e);
        return m;
    };
    ComplexMatrix m0 = branch_trace(0);
    const double p0 = m0.trace().real();
    const int outcome = pick_outcome(p0, forcedOutcome, rngSeed, "measurement");
    ComplexMatrix chosen = outcome == 0 ? std::move(m0) : branch_trace(1);
    const double prob = chosen.trace().real();
    if (prob < tol::kOutcomeFloor)
        throw std::domain_error("sampled branch has vanishing probability");
    return DensityMeasurement{
        MeasurementInfo{outcome, prob, true},
        DensityMatrix::from_matrix(rho.num_qubits(), chosen * cplx{1.0 / prob, 0.0})};
}

double fidelity_pure_vs_mixed(const StateVector& target, const DensityMatrix& rho) {
    if (target.dim() != rho.dim())
        throw std::invalid_argument("fidelity dimension mismatch");
    if (!rho.normalized())
        throw std::invalid_argument("fidelity requires a normalized density matrix");
    cplx acc{0.0, 0.0};
    const auto& t = target.amplitudes();
    for (std::size_t r = 0; r < target.dim(); ++r)
        for (std::size_t c = 0; c < target.dim(); ++c)
            acc += std::conj(t[r]) * rho.matrix().at(r, c) * t[c];
    if (std::abs(acc.imag()) > tol::kAlgebra)
        throw std::logic_error("fidelity has a non-real value");
    return acc.real();
}

double fidelity_pure(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

} // namespace cbrsp::qmath
