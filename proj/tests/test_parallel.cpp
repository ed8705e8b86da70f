#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbrsp/analysis.hpp"
#include "cbrsp/kernels.hpp"
#include "cbrsp/parallel.hpp"
#include "cbrsp/qmath.hpp"

#include <random>
#include <vector>

// The OpenMP paths parallelize over independent output elements with a fixed
// per-element accumulation order, so they must agree with the serial
// reference implementations bit for bit.

using namespace cbrsp;
using kernels::cplx;

namespace {

std::vector<cplx> random_buffer(std::mt19937_64& rng, std::size_t count) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> out(count);
    for (auto& v : out)
        v = cplx{u(rng), u(rng)};
    return out;
}

bool identical(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i])
            return false;
    return true;
}

} // namespace

TEST_CASE("matmul parallel path is bitwise identical") {
    std::mt19937_64 rng(101);
    // Sizes above the dispatch threshold, so the OpenMP path actually runs.
    for (std::size_t n : {64, 97}) {
        const auto a = random_buffer(rng, n * n);
        const auto b = random_buffer(rng, n * n);
        std::vector<cplx> serial(n * n), parallel(n * n);
        kernels::matmul_serial(a.data(), b.data(), serial.data(), n, n, n);
        par::set_enabled(true);
        kernels::matmul(a.data(), b.data(), parallel.data(), n, n, n);
        CHECK(identical(serial, parallel));
    }
}

TEST_CASE("kron parallel path is bitwise identical") {
    std::mt19937_64 rng(103);
    const auto a = random_buffer(rng, 16 * 16);
    const auto b = random_buffer(rng, 16 * 16);
    std::vector<cplx> serial(256 * 256), parallel(256 * 256);
    kernels::kron_serial(a.data(), 16, 16, b.data(), 16, 16, serial.data());
    par::set_enabled(true);
    kernels::kron(a.data(), 16, 16, b.data(), 16, 16, parallel.data());
    CHECK(identical(serial, parallel));
}

TEST_CASE("statevector operator application parallel path is bitwise identical") {
    std::mt19937_64 rng(107);
    const auto op = random_buffer(rng, 4 * 4);
    const std::size_t targets[] = {9, 1};
    for (int rep = 0; rep < 3; ++rep) {
        auto serial = random_buffer(rng, 1 << 12);
        auto parallel = serial;
        kernels::apply_operator_statevector_serial(serial.data(), 12, op.data(), targets, 2);
        par::set_enabled(true);
        kernels::apply_operator_statevector(parallel.data(), 12, op.data(), targets, 2);
        CHECK(identical(serial, parallel));
    }
}

TEST_CASE("embed_operator parallel path is bitwise identical") {
    std::mt19937_64 rng(109);
    const auto op = random_buffer(rng, 4 * 4);
    const std::size_t targets[] = {0, 7};
    std::vector<cplx> serial(512 * 512), parallel(512 * 512);
    kernels::embed_operator_serial(op.data(), targets, 2, 9, serial.data());
    par::set_enabled(true);
    kernels::embed_operator(op.data(), targets, 2, 9, parallel.data());
    CHECK(identical(serial, parallel));
}

TEST_CASE("partial trace parallel path is bitwise identical") {
    std::mt19937_64 rng(113);
    const auto rho = random_buffer(rng, (1 << 10) * (1 << 10));
    const std::size_t keep[] = {4, 0, 2, 9, 6, 1};
    std::vector<cplx> serial(64 * 64), parallel(64 * 64);
    kernels::partial_trace_serial(rho.data(), 10, keep, 6, serial.data());
    par::set_enabled(true);
    kernels::partial_trace(rho.data(), 10, keep, 6, parallel.data());
    CHECK(identical(serial, parallel));
}

TEST_CASE("single qubit sandwich parallel path is bitwise identical") {
    std::mt19937_64 rng(127);
    const auto e = random_buffer(rng, 4);
    const cplx eArr[4] = {e[0], e[1], e[2], e[3]};
    auto serial = random_buffer(rng, (1 << 9) * (1 << 9));
    auto parallel = serial;
    kernels::single_qubit_sandwich_serial(serial.data(), 9, 2, eArr);
    par::set_enabled(true);
    kernels::single_qubit_sandwich(parallel.data(), 9, 2, eArr);
    CHECK(identical(serial, parallel));
}

TEST_CASE("add and copy parallel paths are bitwise identical") {
    std::mt19937_64 rng(131);
    const std::size_t count = 1 << 17;
    const auto src = random_buffer(rng, count);
    auto serial = random_buffer(rng, count);
    auto parallel = serial;
    kernels::add_inplace_serial(serial.data(), src.data(), count);
    par::set_enabled(true);
    kernels::add_inplace(parallel.data(), src.data(), count);
    CHECK(identical(serial, parallel));

    std::vector<cplx> dstSerial(count), dstParallel(count);
    kernels::copy_buffer_serial(dstSerial.data(), src.data(), count);
    kernels::copy_buffer(dstParallel.data(), src.data(), count);
    CHECK(identical(dstSerial, dstParallel));
}

TEST_CASE("whole pipeline and sweep agree across both paths") {
    analysis::SweepGrid grid;
    grid.models = {noise::NoiseModel::AmplitudeDamping, noise::NoiseModel::PhaseDamping};
    grid.etas = {0.0, 0.3, 0.9};
    grid.theta1s = {0.4, 1.2};
    grid.theta2s = {0.8};
    grid.phi1s = {0.0, 2.2};

    par::set_enabled(true);
    const auto parallel = analysis::sweep(grid);
    std::vector<analysis::FidelityRecord> serial;
    {
        par::SerialSection section;
        serial = analysis::sweep(grid);
    }
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].F_sim == parallel[i].F_sim);
        CHECK(serial[i].F_closed == parallel[i].F_closed);
        CHECK(serial[i].selection_probability == parallel[i].selection_probability);
    }
}
