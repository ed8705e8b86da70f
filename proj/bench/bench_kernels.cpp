// Timing comparison between the serial reference kernels and the OpenMP
// paths. Run manually: build/bench/cbrsp_bench [repeats]

#include "cbrsp/analysis.hpp"
#include "cbrsp/channels.hpp"
#include "cbrsp/kernels.hpp"
#include "cbrsp/noise.hpp"
#include "cbrsp/parallel.hpp"
#include "cbrsp/qmath.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

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

double time_seconds(int repeats, const std::function<void()>& fn) {
    fn(); // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i)
        fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count() / repeats;
}

void report(const char* name, int repeats, const std::function<void()>& fn) {
    par::set_enabled(false);
    const double serial = time_seconds(repeats, fn);
    par::set_enabled(true);
    const double parallel = time_seconds(repeats, fn);
    std::printf("%-34s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel);
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
    std::mt19937_64 rng(5150);
    std::printf("threads available: %d, repeats per kernel: %d\n", [] {
        par::set_enabled(true);
        return par::max_threads();
    }(), repeats);

    {
        const std::size_t n = 1 << 9;
        const auto a = random_buffer(rng, n * n);
        const auto b = random_buffer(rng, n * n);
        std::vector<cplx> out(n * n);
        report("matmul 512x512", repeats,
               [&] { kernels::matmul(a.data(), b.data(), out.data(), n, n, n); });
    }
    {
        const std::size_t n = 1 << 10; // full 10-qubit density matrix product
        const auto a = random_buffer(rng, n * n);
        const auto b = random_buffer(rng, n * n);
        std::vector<cplx> out(n * n);
        report("matmul 1024x1024", repeats,
               [&] { kernels::matmul(a.data(), b.data(), out.data(), n, n, n); });
    }
    {
        auto rho = random_buffer(rng, (1 << 10) * (1 << 10));
        const auto e = random_buffer(rng, 4);
        const cplx eArr[4] = {e[0], e[1], e[2], e[3]};
        report("single-qubit sandwich, 10 qubits", repeats,
               [&] { kernels::single_qubit_sandwich(rho.data(), 10, 4, eArr); });
    }
    {
        const auto rho = random_buffer(rng, (1 << 10) * (1 << 10));
        const std::size_t keep[] = {0, 5, 9};
        std::vector<cplx> out(8 * 8);
        report("partial trace 10 -> 3 qubits", repeats,
               [&] { kernels::partial_trace(rho.data(), 10, keep, 3, out.data()); });
    }
    {
        // 9-qubit joint state: channel (x) two spectator qubits.
        const auto channel = channels::make_seven_qubit_channel(
            channels::seven_from_five(channels::noise_study_preset(), 0));
        const auto rho = qmath::DensityMatrix::pure(
            tensor_product(channel, qmath::StateVector::basis_state(2, 0)));
        noise::NoiseGrouping grouping{{{"i", {0, 5}}, {"j", {2, 3}}}, {1, 4, 6, 7, 8}};
        report("grouped noise, 9-qubit state", repeats, [&] {
            (void)noise::apply_grouped_noise(rho, noise::kraus_pd(0.4), grouping);
        });
    }
    {
        const auto grid = analysis::SweepGrid::verification_grid();
        report("verification-grid sweep", 1, [&] { (void)analysis::sweep(grid); });
    }
    return 0;
}
