#pragma once

#include <complex>
#include <cstddef>

// Low-level dense kernels. Every kernel has a serial reference implementation
// (the *_serial variant) and an OpenMP variant; the unsuffixed entry point
// dispatches on cbrsp::par::enabled() plus a per-kernel work threshold, since
// spawning a team costs more than the whole job on small operands. Parallelism
// is always over independent output elements with a fixed per-element
// accumulation order, so the two paths produce bitwise-identical results.

namespace cbrsp::kernels {

using cplx = std::complex<double>;

/// out(n x m) = a(n x k) * b(k x m), row-major. out must not alias a or b.
void matmul(const cplx* a, const cplx* b, cplx* out,
            std::size_t n, std::size_t k, std::size_t m);
void matmul_serial(const cplx* a, const cplx* b, cplx* out,
                   std::size_t n, std::size_t k, std::size_t m);

/// Kronecker product: out((ra*rb) x (ca*cb)) = a (x) b, row-major.
void kron(const cplx* a, std::size_t ra, std::size_t ca,
          const cplx* b, std::size_t rb, std::size_t cb, cplx* out);
void kron_serial(const cplx* a, std::size_t ra, std::size_t ca,
                 const cplx* b, std::size_t rb, std::size_t cb, cplx* out);

/// In-place application of a 2^t x 2^t operator to the listed qubits of a
/// 2^numQubits amplitude vector. Qubit 0 is the most significant bit of the
/// basis index; targets[0] is the most significant bit of the operator's
/// sub-index.
void apply_operator_statevector(cplx* amps, std::size_t numQubits,
                                const cplx* op,
                                const std::size_t* targets, std::size_t numTargets);
void apply_operator_statevector_serial(cplx* amps, std::size_t numQubits,
                                       const cplx* op,
                                       const std::size_t* targets, std::size_t numTargets);

/// Embeds a 2^t x 2^t operator acting on the listed qubits into the full
/// 2^n x 2^n matrix (identity on the rest).
void embed_operator(const cplx* op, const std::size_t* targets, std::size_t numTargets,
                    std::size_t numQubits, cplx* out);
void embed_operator_serial(const cplx* op, const std::size_t* targets, std::size_t numTargets,
                           std::size_t numQubits, cplx* out);

/// Partial trace of a 2^n x 2^n density matrix onto the kept qubits, in the
/// listed order (keep[0] becomes the most significant output bit).
void partial_trace(const cplx* rho, std::size_t numQubits,
                   const std::size_t* keep, std::size_t numKeep, cplx* out);
void partial_trace_serial(const cplx* rho, std::size_t numQubits,
                          const std::size_t* keep, std::size_t numKeep, cplx* out);

/// rho <- (E on qubit) rho (E on qubit)^dagger for a single-qubit operator
/// e = {e00,e01,e10,e11}; O(dim^2). E need not be unitary.
void single_qubit_sandwich(cplx* rho, std::size_t numQubits, std::size_t qubit,
                           const cplx e[4]);
void single_qubit_sandwich_serial(cplx* rho, std::size_t numQubits, std::size_t qubit,
                                  const cplx e[4]);

/// dst[i] += src[i] and dst[i] = src[i] over count elements.
void add_inplace(cplx* dst, const cplx* src, std::size_t count);
void add_inplace_serial(cplx* dst, const cplx* src, std::size_t count);
void copy_buffer(cplx* dst, const cplx* src, std::size_t count);
void copy_buffer_serial(cplx* dst, const cplx* src, std::size_t count);

} // namespace cbrsp::kernels
