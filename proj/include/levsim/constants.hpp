#pragma once

// CODATA 2018 values in SI units.
namespace levsim::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J / K
inline constexpr double c_light = 299792458.0;        // m / s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F / m
inline constexpr double amu = 1.66053906660e-27;      // kg
inline constexpr double mbar_to_pa = 100.0;

}  // namespace levsim::constants
