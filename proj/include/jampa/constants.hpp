#pragma once

#include <numbers>

namespace jampa::constants {

// SI 2019 exact values.
inline constexpr double planck = 6.62607015e-34;
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double boltzmann = 1.380649e-23;

/// Flux quantum h/2e.
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);
/// Reduced flux quantum hbar/2e.
inline constexpr double reduced_flux_quantum = hbar / (2.0 * elementary_charge);
/// Superconducting resistance quantum hbar/(2e)^2.
inline constexpr double resistance_quantum =
    hbar / (4.0 * elementary_charge * elementary_charge);

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace jampa::constants
