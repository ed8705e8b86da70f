#pragma once

namespace cbrsp::par {

/// Global switch for the OpenMP kernel paths. Defaults to on when built
/// with OpenMP. The serial reference paths stay available either way and
/// produce bitwise-identical results (fixed per-element accumulation order).
bool enabled() noexcept;
void set_enabled(bool on) noexcept;

/// Number of threads the parallel paths may use (1 without OpenMP).
int max_threads() noexcept;

/// RAII guard for temporarily forcing the serial path in tests.
class SerialSection {
public:
    SerialSection();
    ~SerialSection();
    SerialSection(const SerialSection&) = delete;
    SerialSection& operator=(const SerialSection&) = delete;

private:
    bool previous_;
};

} // namespace cbrsp::par
