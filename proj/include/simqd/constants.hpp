#pragma once

#include <numbers>

namespace simqd::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double electron_volt = 1.602176634e-19;  // J

}  // namespace simqd::constants
