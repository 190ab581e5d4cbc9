#pragma once

#include <cstdint>
#include <random>

namespace kaczmarz {

/// Seedable generator used by every stochastic routine in the library.
///
/// The bit source is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard, so streams reproduce across compilers and platforms. The
/// distributions are implemented here rather than taken from <random>
/// because the standard leaves those implementation-defined:
///
///  - uniform(): top 53 bits of one draw scaled by 2^-53, in [0, 1).
///  - gaussian(): Kinderman-Monahan ratio of uniforms with the exact
///    acceptance test x^2 <= -4 ln u.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double gaussian();

private:
    std::mt19937_64 engine_;
};

}  // namespace kaczmarz
