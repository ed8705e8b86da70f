#include "cbrsp/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbrsp::par {

namespace {
#ifdef _OPENMP
std::atomic<bool> g_enabled{true};
#else
std::atomic<bool> g_enabled{false};
#endif
} // namespace

bool enabled() noexcept { return g_enabled.load(std::memory_order_relaxed); }

void set_enabled(bool on) noexcept {
#ifdef _OPENMP
    g_enabled.store(on, std::memory_order_relaxed);
#else
    (void)on;
#endif
}

int max_threads() noexcept {
#ifdef _OPENMP
    return enabled() ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

SerialSection::SerialSection() : previous_(enabled()) { set_enabled(false); }
SerialSection::~SerialSection() { set_enabled(previous_); }

} // namespace cbrsp::par
