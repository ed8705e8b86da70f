#include "cbrsp/kernels.hpp"

#include "cbrsp/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace cbrsp::kernels {

namespace {

// Work thresholds below which the serial path always runs.
constexpr std::size_t kMatmulWork = 256 * 256 * 4;      // n*k*m
constexpr std::size_t kKronWork = 1u << 16;             // output elements
constexpr std::size_t kStatevecDim = 1u << 11;
constexpr std::size_t kEmbedDim = 1u << 9;
constexpr std::size_t kTraceWork = 1u << 16;            // outDim^2 * traced combos
constexpr std::size_t kSandwichDim = 1u << 8;
constexpr std::size_t kLinearWork = 1u << 16;

inline void matmul_row(const cplx* a, const cplx* b, cplx* out,
                       std::size_t i, std::size_t k, std::size_t m) {
    cplx* outRow = out + i * m;
    std::fill(outRow, outRow + m, cplx{0.0, 0.0});
    const cplx* aRow = a + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
        const cplx av = aRow[kk];
        if (av == cplx{0.0, 0.0})
            continue;
        const cplx* bRow = b + kk * m;
        for (std::size_t j = 0; j < m; ++j)
            outRow[j] += av * bRow[j];
    }
}

// Inserts zero bits at the given positions (ascending) into a compact index.
inline std::size_t expand_index(std::size_t compact, const std::vector<std::size_t>& positions) {
    for (std::size_t p : positions) {
        const std::size_t low = compact & ((std::size_t{1} << p) - 1);
        compact = ((compact >> p) << (p + 1)) | low;
    }
    return compact;
}

struct TargetLayout {
    std::vector<std::size_t> bitPos;       // bit position of targets[i] (MSB-first sub-index)
    std::vector<std::size_t> sortedBitPos; // ascending, for outer-index expansion
    std::size_t subDim;
};

TargetLayout make_layout(std::size_t numQubits, const std::size_t* targets, std::size_t numTargets) {
    TargetLayout lay;
    lay.bitPos.resize(numTargets);
    for (std::size_t i = 0; i < numTargets; ++i)
        lay.bitPos[i] = numQubits - 1 - targets[i];
    lay.sortedBitPos = lay.bitPos;
    std::sort(lay.sortedBitPos.begin(), lay.sortedBitPos.end());
    lay.subDim = std::size_t{1} << numTargets;
    return lay;
}

inline void apply_block(cplx* amps, const cplx* op, const TargetLayout& lay,
                        std::size_t base, cplx* x, cplx* y) {
    const std::size_t t = lay.bitPos.size();
    for (std::size_t s = 0; s < lay.subDim; ++s) {
        std::size_t idx = base;
        for (std::size_t i = 0; i < t; ++i)
            idx |= ((s >> (t - 1 - i)) & 1u) << lay.bitPos[i];
        x[s] = amps[idx];
    }
    for (std::size_t r = 0; r < lay.subDim; ++r) {
        cplx acc{0.0, 0.0};
        const cplx* opRow = op + r * lay.subDim;
        for (std::size_t c = 0; c < lay.subDim; ++c)
            acc += opRow[c] * x[c];
        y[r] = acc;
    }
    for (std::size_t s = 0; s < lay.subDim; ++s) {
        std::size_t idx = base;
        for (std::size_t i = 0; i < t; ++i)
            idx |= ((s >> (t - 1 - i)) & 1u) << lay.bitPos[i];
        amps[idx] = y[s];
    }
}

} // namespace

void matmul_serial(const cplx* a, const cplx* b, cplx* out,
                   std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i)
        matmul_row(a, b, out, i, k, m);
}

void matmul(const cplx* a, const cplx* b, cplx* out,
            std::size_t n, std::size_t k, std::size_t m) {
    if (!par::enabled() || n * k * m < kMatmulWork) {
        matmul_serial(a, b, out, n, k, m);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        matmul_row(a, b, out, static_cast<std::size_t>(i), k, m);
}

void kron_serial(const cplx* a, std::size_t ra, std::size_t ca,
                 const cplx* b, std::size_t rb, std::size_t cb, cplx* out) {
    const std::size_t cols = ca * cb;
    for (std::size_t i = 0; i < ra * rb; ++i) {
        const std::size_t ia = i / rb, ib = i % rb;
        for (std::size_t ja = 0; ja < ca; ++ja) {
            const cplx av = a[ia * ca + ja];
            cplx* dst = out + i * cols + ja * cb;
            const cplx* bRow = b + ib * cb;
            for (std::size_t jb = 0; jb < cb; ++jb)
                dst[jb] = av * bRow[jb];
        }
    }
}

void kron(const cplx* a, std::size_t ra, std::size_t ca,
          const cplx* b, std::size_t rb, std::size_t cb, cplx* out) {
    if (!par::enabled() || ra * rb * ca * cb < kKronWork) {
        kron_serial(a, ra, ca, b, rb, cb, out);
        return;
    }
    const std::size_t cols = ca * cb;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ra * rb); ++i) {
        const std::size_t ia = static_cast<std::size_t>(i) / rb, ib = static_cast<std::size_t>(i) % rb;
        for (std::size_t ja = 0; ja < ca; ++ja) {
            const cplx av = a[ia * ca + ja];
            cplx* dst = out + static_cast<std::size_t>(i) * cols + ja * cb;
            const cplx* bRow = b + ib * cb;
            for (std::size_t jb = 0; jb < cb; ++jb)
                dst[jb] = av * bRow[jb];
        }
    }
}

void apply_operator_statevector_serial(cplx* amps, std::size_t numQubits,
                                       const cplx* op,
                                       const std::size_t* targets, std::size_t numTargets) {
    const TargetLayout lay = make_layout(numQubits, targets, numTargets);
    const std::size_t outerCount = std::size_t{1} << (numQubits - numTargets);
    std::vector<cplx> x(lay.subDim), y(lay.subDim);
    for (std::size_t outer = 0; outer < outerCount; ++outer)
        apply_block(amps, op, lay, expand_index(outer, lay.sortedBitPos), x.data(), y.data());
}

void apply_operator_statevector(cplx* amps, std::size_t numQubits,
                                const cplx* op,
                                const std::size_t* targets, std::size_t numTargets) {
    if (!par::enabled() || (std::size_t{1} << numQubits) < kStatevecDim) {
        apply_operator_statevector_serial(amps, numQubits, op, targets, numTargets);
        return;
    }
    const TargetLayout lay = make_layout(numQubits, targets, numTargets);
    const std::size_t outerCount = std::size_t{1} << (numQubits - numTargets);
#pragma omp parallel
    {
        std::vector<cplx> x(lay.subDim), y(lay.subDim);
#pragma omp for schedule(static)
        for (std::int64_t outer = 0; outer < static_cast<std::int64_t>(outerCount); ++outer)
            apply_block(amps, op, lay,
                        expand_index(static_cast<std::size_t>(outer), lay.sortedBitPos),
                        x.data(), y.data());
    }
}

namespace {

inline void embed_column(const cplx* op, const TargetLayout& lay, std::size_t dim,
                         cplx* out, std::size_t col) {
    const std::size_t t = lay.bitPos.size();
    std::size_t targetMask = 0;
    for (std::size_t p : lay.bitPos)
        targetMask |= std::size_t{1} << p;
    std::size_t subCol = 0;
    for (std::size_t i = 0; i < t; ++i)
        subCol |= ((col >> lay.bitPos[i]) & 1u) << (t - 1 - i);
    const std::size_t outer = col & ~targetMask;
    for (std::size_t subRow = 0; subRow < lay.subDim; ++subRow) {
        std::size_t row = outer;
        for (std::size_t i = 0; i < t; ++i)
            row |= ((subRow >> (t - 1 - i)) & 1u) << lay.bitPos[i];
        out[row * dim + col] = op[subRow * lay.subDim + subCol];
    }
}

} // namespace

void embed_operator_serial(const cplx* op, const std::size_t* targets, std::size_t numTargets,
                           std::size_t numQubits, cplx* out) {
    const TargetLayout lay = make_layout(numQubits, targets, numTargets);
    const std::size_t dim = std::size_t{1} << numQubits;
    std::fill(out, out + dim * dim, cplx{0.0, 0.0});
    for (std::size_t col = 0; col < dim; ++col)
        embed_column(op, lay, dim, out, col);
}

void embed_operator(const cplx* op, const std::size_t* targets, std::size_t numTargets,
                    std::size_t numQubits, cplx* out) {
    if (!par::enabled() || (std::size_t{1} << numQubits) < kEmbedDim) {
        embed_operator_serial(op, targets, numTargets, numQubits, out);
        return;
    }
    const TargetLayout lay = make_layout(numQubits, targets, numTargets);
    const std::size_t dim = std::size_t{1} << numQubits;
    std::fill(out, out + dim * dim, cplx{0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (std::int64_t col = 0; col < static_cast<std::int64_t>(dim); ++col)
        embed_column(op, lay, dim, out, static_cast<std::size_t>(col));
}

namespace {

struct TraceLayout {
    std::vector<std::size_t> keepOffsets;   // keepOffsets[r]: bits of output index r placed in full index
    std::vector<std::size_t> tracedOffsets; // one per traced combination
    std::size_t dim;
};

TraceLayout make_trace_layout(std::size_t numQubits, const std::size_t* keep, std::size_t numKeep) {
    TraceLayout lay;
    lay.dim = std::size_t{1} << numQubits;
    std::vector<std::size_t> keepPos(numKeep);
    std::vector<bool> kept(numQubits, false);
    for (std::size_t i = 0; i < numKeep; ++i) {
        keepPos[i] = numQubits - 1 - keep[i];
        kept[keep[i]] = true;
    }
    std::vector<std::size_t> tracedPos;
    for (std::size_t q = 0; q < numQubits; ++q)
        if (!kept[q])
            tracedPos.push_back(numQubits - 1 - q);

    const std::size_t outDim = std::size_t{1} << numKeep;
    lay.keepOffsets.resize(outDim);
    for (std::size_t r = 0; r < outDim; ++r) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < numKeep; ++i)
            off |= ((r >> (numKeep - 1 - i)) & 1u) << keepPos[i];
        lay.keepOffsets[r] = off;
    }
    const std::size_t tracedCount = std::size_t{1} << tracedPos.size();
    lay.tracedOffsets.resize(tracedCount);
    for (std::size_t tcombo = 0; tcombo < tracedCount; ++tcombo) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < tracedPos.size(); ++i)
            off |= ((tcombo >> i) & 1u) << tracedPos[i];
        lay.tracedOffsets[tcombo] = off;
    }
    return lay;
}

inline cplx trace_entry(const cplx* rho, const TraceLayout& lay, std::size_t rOff, std::size_t cOff) {
    cplx acc{0.0, 0.0};
    for (std::size_t t : lay.tracedOffsets)
        acc += rho[(rOff | t) * lay.dim + (cOff | t)];
    return acc;
}

} // namespace

void partial_trace_serial(const cplx* rho, std::size_t numQubits,
                          const std::size_t* keep, std::size_t numKeep, cplx* out) {
    const TraceLayout lay = make_trace_layout(numQubits, keep, numKeep);
    const std::size_t outDim = std::size_t{1} << numKeep;
    for (std::size_t r = 0; r < outDim; ++r)
        for (std::size_t c = 0; c < outDim; ++c)
            out[r * outDim + c] = trace_entry(rho, lay, lay.keepOffsets[r], lay.keepOffsets[c]);
}

void partial_trace(const cplx* rho, std::size_t numQubits,
                   const std::size_t* keep, std::size_t numKeep, cplx* out) {
    if (!par::enabled() ||
        (std::size_t{1} << (2 * numKeep + (numQubits - numKeep))) < kTraceWork) {
        partial_trace_serial(rho, numQubits, keep, numKeep, out);
        return;
    }
    const TraceLayout lay = make_trace_layout(numQubits, keep, numKeep);
    const std::size_t outDim = std::size_t{1} << numKeep;
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(outDim * outDim); ++idx) {
        const std::size_t r = static_cast<std::size_t>(idx) / outDim;
        const std::size_t c = static_cast<std::size_t>(idx) % outDim;
        out[static_cast<std::size_t>(idx)] = trace_entry(rho, lay, lay.keepOffsets[r], lay.keepOffsets[c]);
    }
}

namespace {

// Left multiply: mixes row pairs within one column. Columns are independent.
inline void sandwich_column(cplx* rho, std::size_t dim, std::size_t mask,
                            const cplx e[4], std::size_t col) {
    for (std::size_t r0 = 0; r0 < dim; ++r0) {
        if (r0 & mask)
            continue;
        const std::size_t r1 = r0 | mask;
        const cplx a = rho[r0 * dim + col];
        const cplx b = rho[r1 * dim + col];
        rho[r0 * dim + col] = e[0] * a + e[1] * b;
        rho[r1 * dim + col] = e[2] * a + e[3] * b;
    }
}

// Right multiply by E^dagger: mixes column pairs within one row.
inline void sandwich_row(cplx* rho, std::size_t dim, std::size_t mask,
                         const cplx e[4], std::size_t row) {
    cplx* r = rho + row * dim;
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
        if (c0 & mask)
            continue;
        const std::size_t c1 = c0 | mask;
        const cplx a = r[c0];
        const cplx b = r[c1];
        r[c0] = std::conj(e[0]) * a + std::conj(e[1]) * b;
        r[c1] = std::conj(e[2]) * a + std::conj(e[3]) * b;
    }
}

} // namespace

void single_qubit_sandwich_serial(cplx* rho, std::size_t numQubits, std::size_t qubit,
                                  const cplx e[4]) {
    const std::size_t dim = std::size_t{1} << numQubits;
    const std::size_t mask = std::size_t{1} << (numQubits - 1 - qubit);
    for (std::size_t col = 0; col < dim; ++col)
        sandwich_column(rho, dim, mask, e, col);
    for (std::size_t row = 0; row < dim; ++row)
        sandwich_row(rho, dim, mask, e, row);
}

void single_qubit_sandwich(cplx* rho, std::size_t numQubits, std::size_t qubit,
                           const cplx e[4]) {
    if (!par::enabled() || (std::size_t{1} << numQubits) < kSandwichDim) {
        single_qubit_sandwich_serial(rho, numQubits, qubit, e);
        return;
    }
    const std::size_t dim = std::size_t{1} << numQubits;
    const std::size_t mask = std::size_t{1} << (numQubits - 1 - qubit);
#pragma omp parallel for schedule(static)
    for (std::int64_t col = 0; col < static_cast<std::int64_t>(dim); ++col)
        sandwich_column(rho, dim, mask, e, static_cast<std::size_t>(col));
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < static_cast<std::int64_t>(dim); ++row)
        sandwich_row(rho, dim, mask, e, static_cast<std::size_t>(row));
}

void add_inplace_serial(cplx* dst, const cplx* src, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
        dst[i] += src[i];
}

void add_inplace(cplx* dst, const cplx* src, std::size_t count) {
    if (!par::enabled() || count < kLinearWork) {
        add_inplace_serial(dst, src, count);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
        dst[i] += src[i];
}

void copy_buffer_serial(cplx* dst, const cplx* src, std::size_t count) {
    std::copy(src, src + count, dst);
}

void copy_buffer(cplx* dst, const cplx* src, std::size_t count) {
    if (!par::enabled() || count < kLinearWork) {
        copy_buffer_serial(dst, src, count);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
        dst[i] = src[i];
}

} // namespace cbrsp::kernels
