#pragma once

#include <numbers>

namespace qdtele::units {

// Reduced Planck constant in µeV·ps, so an FSS phase is fss_uev * t_ps / kHbarUevPs.
inline constexpr double kHbarUevPs = 658.2119569;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angular frequency (rad/ps) of a frequency given in GHz.
constexpr double ghz_to_rad_per_ps(double ghz) { return kTwoPi * ghz * 1e-3; }
constexpr double rad_per_ps_to_ghz(double w) { return w / kTwoPi * 1e3; }

// Lorentzian FWHM (GHz) of a transition with the given lifetime.
constexpr double fourier_limit_ghz(double lifetime_ps) { return 1e3 / (kTwoPi * lifetime_ps); }

constexpr double ps_to_s(double ps) { return ps * 1e-12; }
constexpr double ns_to_ps(double ns) { return ns * 1e3; }

// Average fidelity bound for measure-and-prepare strategies.
inline constexpr double kClassicalFidelityThreshold = 2.0 / 3.0;

}  // namespace qdtele::units
