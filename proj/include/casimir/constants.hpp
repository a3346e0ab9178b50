#pragma once

#include <numbers>

namespace casimir {

/// CODATA 2018 exact/recommended values in SI units.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;          // J s
    static constexpr double c = 299792458.0;                 // m/s
    static constexpr double elementary_charge = 1.602176634e-19;  // C
    static constexpr double epsilon0 = 8.8541878128e-12;     // F/m
    static constexpr double hbar_ev = hbar / elementary_charge;  // eV s
};

inline constexpr double pi = std::numbers::pi;

/// Photon energy in eV to angular frequency in rad/s.
constexpr double ev_to_rad_per_s(double ev) { return ev / PhysicalConstants::hbar_ev; }
constexpr double rad_per_s_to_ev(double w) { return w * PhysicalConstants::hbar_ev; }

/// -pi^2 hbar c / (240 z^4): pressure between ideal mirrors at zero temperature.
constexpr double ideal_casimir_pressure(double z) {
    return -pi * pi * PhysicalConstants::hbar * PhysicalConstants::c / (240.0 * z * z * z * z);
}

}  // namespace casimir
