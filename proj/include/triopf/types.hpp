#pragma once

#include <array>
#include <complex>

namespace triopf {

using Complex = std::complex<double>;

inline constexpr int kPhaseCount = 3;

/// Per-phase complex voltage (a, b, c) in rectangular coordinates, per-unit.
using PhaseVoltage = std::array<Complex, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline char phase_name(int p) { return static_cast<char>('a' + p); }

} // namespace triopf
