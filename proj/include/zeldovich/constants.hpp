#pragma once

#include <numbers>

namespace zeldovich::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
/// Vacuum permeability, H/m (pre-2019 exact value; the revised SI value differs by 1e-10).
inline constexpr double mu0 = 4.0e-7 * std::numbers::pi;
/// Boltzmann constant, J/K.
inline constexpr double k_boltzmann = 1.380649e-23;

}  // namespace zeldovich::constants
