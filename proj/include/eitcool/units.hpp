// units.hpp — Physical constants and unit conversions used throughout the library.
//
// Convention: every frequency-like quantity (trap frequencies, Rabi frequencies,
// detunings, decay rates, Zeeman shifts) is stored internally as an ANGULAR
// frequency in rad/s. Conversion from "ordinary" frequency units happens at the
// boundaries (config parsing, constructors taking Hz-style inputs).

#pragma once

#include <cmath>

namespace eitcool::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double boltzmann = 1.380649e-23;          // J/K
inline constexpr double atomic_mass = 1.66053906660e-27;   // kg

// Bohr magneton divided by hbar: Zeeman shift per tesla, rad s^-1 T^-1.
inline constexpr double bohr_magneton_over_hbar = 9.2740100783e-24 / hbar;

// Mass of a 40Ca+ ion (atomic mass of 40Ca minus one electron mass).
inline constexpr double ca40_ion_mass = (39.9625909 * atomic_mass) - 9.1093837015e-31;

// Ordinary frequency -> angular frequency.
inline constexpr double hz(double f) { return two_pi * f; }
inline constexpr double khz(double f) { return two_pi * 1e3 * f; }
inline constexpr double mhz(double f) { return two_pi * 1e6 * f; }

// Harmonic-oscillator ground-state extent for an ion of mass m in a trap of
// angular frequency nu.
inline double ground_state_extent(double mass, double nu) {
    return std::sqrt(hbar / (2.0 * mass * nu));
}

// Lamb-Dicke parameter for light of wavelength lambda projected with cos_theta
// onto a mode of angular frequency nu. Signed: cos_theta < 0 encodes a beam
// that counter-propagates relative to the chosen mode axis.
inline double lamb_dicke(double wavelength, double cos_theta, double mass, double nu) {
    return (two_pi / wavelength) * cos_theta * ground_state_extent(mass, nu);
}

} // namespace eitcool::units
