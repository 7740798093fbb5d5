#pragma once

// Unit convention: frequencies and couplings are angular (rad/s), rates are
// 1/s, spectral densities are per rad/s. Helpers below convert the "/2pi"
// numbers that appear in lab notes (Hz, MHz, us, /MHz) into that convention.

#include <numbers>
#include <string>
#include <string_view>

namespace tlsbath::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double planck = 6.62607015e-34;           // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);  // Wb

constexpr double angular(double hz) { return two_pi * hz; }
constexpr double to_hz(double rad_per_s) { return rad_per_s / two_pi; }

constexpr double hz(double v) { return angular(v); }
constexpr double khz(double v) { return angular(v * 1e3); }
constexpr double mhz(double v) { return angular(v * 1e6); }
constexpr double ghz(double v) { return angular(v * 1e9); }

constexpr double s(double v) { return v; }
constexpr double ms(double v) { return v * 1e-3; }
constexpr double us(double v) { return v * 1e-6; }
constexpr double ns(double v) { return v * 1e-9; }

/// Rate whose lifetime is `seconds`.
constexpr double rate_from_lifetime(double seconds) { return 1.0 / seconds; }

/// Density given as "per Hz" converted to per rad/s, and back.
constexpr double density_from_per_hz(double per_hz) { return per_hz / two_pi; }
constexpr double density_to_per_hz(double per_rad) { return per_rad * two_pi; }

/// TLS density quoted as "N per MHz" (or GHz) in per rad/s.
constexpr double per_mhz(double v) { return density_from_per_hz(v * 1e-6); }
constexpr double per_ghz(double v) { return density_from_per_hz(v * 1e-9); }

/// Physical categories accepted by `parse_quantity`.
enum class Kind {
    frequency,       // Hz, kHz, MHz, GHz              -> rad/s
    duration,        // s, ms, us, ns, ps              -> s
    rate,            // a frequency (Gamma/2pi) or a lifetime -> 1/s
    density,         // /Hz, /kHz, /MHz, /GHz          -> per rad/s
    length,          // m, mm, um, nm, A               -> m
    area,            // m2, mm2, um2, nm2              -> m^2
    capacitance,     // F, pF, fF                      -> F
    voltage,         // V, mV, uV, nV                  -> V
    dipole,          // Cm, eA, D                      -> C m
    volume_density,  // /m3/Hz, /um3/GHz               -> 1/(m^3 Hz)
};

std::string_view kind_name(Kind kind);

/// Converts "6.3 GHz", "34us", "20 /MHz" into the internal unit of `kind`.
/// A bare number (no suffix) is always rejected. Units are case-insensitive
/// and "µ" is accepted for "u". Throws std::invalid_argument.
double parse_quantity(std::string_view text, Kind kind);

/// True when `unit` (already trimmed) is a recognised suffix for `kind`.
bool is_valid_unit(std::string_view unit, Kind kind);

}  // namespace tlsbath::units
