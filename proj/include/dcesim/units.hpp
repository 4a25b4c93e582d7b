#pragma once

#include <numbers>

// All internal quantities use natural units with c = 1: lengths, times and
// inverse lengths (wavenumbers, angular frequencies, conductivity potential V)
// are expressed in metres or inverse metres. Conversions to SI seconds and Hz
// happen only at the I/O boundary.
namespace dcesim::units {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Speed of light used for all unit conversions (m/s).
inline constexpr double kSpeedOfLight = 2.998e8;

inline constexpr double seconds_to_length(double t_s) { return t_s * kSpeedOfLight; }
inline constexpr double length_to_seconds(double t_m) { return t_m / kSpeedOfLight; }

/// Angular frequency in m^-1 -> ordinary frequency in Hz.
inline constexpr double omega_to_hz(double omega) { return omega * kSpeedOfLight / kTwoPi; }

/// A rate in m^-1 (per unit c*t) -> rate per second.
inline constexpr double rate_to_per_second(double r) { return r * kSpeedOfLight; }

}  // namespace dcesim::units
