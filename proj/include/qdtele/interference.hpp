#pragma once

// Time-resolved two-photon interference of the two XX photons at the BSM
// beamsplitter.
//
// The interference kernel factorizes into the cascade term e^{−γ_X|τ|}, the
// Gaussian spectral-jitter term e^{−(σ₁²+σ₂²)τ²/2} and the detuning beat
// cos(Δ̄τ). Its integral against the distinguishable-photon coincidence density
// over all τ reduces to γ_XX/(γ_XX+γ_X) when jitter and detuning vanish.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "qdtele/errors.hpp"
#include "qdtele/qdsource.hpp"
#include "qdtele/units.hpp"

namespace qdtele {

struct WavepacketSpec {
  double gamma = 0.0;        // 1/ps
  double sigma_omega = 0.0;  // rad/ps
  double detuning = 0.0;     // rad/ps
};

struct InterferenceModel {
  WavepacketSpec photon1;
  WavepacketSpec photon2;
  double gamma_x = 0.0;  // 1/ps
};

inline void require_valid(const InterferenceModel& m) {
  detail::require(m.photon1.gamma > 0.0 && m.photon2.gamma > 0.0 && m.gamma_x > 0.0,
                  "interference model: all decay rates must be > 0");
  detail::require(m.photon1.sigma_omega >= 0.0 && m.photon2.sigma_omega >= 0.0,
                  "interference model: spectral jitter must be >= 0");
  detail::require(std::isfinite(m.photon1.detuning) && std::isfinite(m.photon2.detuning),
                  "interference model: detuning must be finite");
}

inline double cascade_visibility_bound(double gamma_xx, double gamma_x) {
  if (!(gamma_xx > 0.0) || !(gamma_x > 0.0)) throw InputError("cascade_visibility_bound: rates must be > 0");
  return gamma_xx / (gamma_xx + gamma_x);
}

inline double visibility_kernel(double tau_ps, const InterferenceModel& m) {
  const double s2 = m.photon1.sigma_omega * m.photon1.sigma_omega + m.photon2.sigma_omega * m.photon2.sigma_omega;
  const double beat = m.photon1.detuning - m.photon2.detuning;
  return std::exp(-m.gamma_x * std::abs(tau_ps)) * std::exp(-0.5 * s2 * tau_ps * tau_ps) * std::cos(beat * tau_ps);
}

struct CoincidenceDensities {
  double parallel;
  double orthogonal;
};

// τ = t₂ − t₁. Distinguishable photons: rate γ₂ governs τ > 0, γ₁ governs τ < 0.
// Normalized so that ∫G⊥ dτ = 1.
inline double orthogonal_density(double tau_ps, const InterferenceModel& m) {
  const double g1 = m.photon1.gamma, g2 = m.photon2.gamma;
  const double peak = g1 * g2 / (g1 + g2);
  return tau_ps >= 0.0 ? peak * std::exp(-g2 * tau_ps) : peak * std::exp(g1 * tau_ps);
}

inline CoincidenceDensities coincidence_densities(double tau_ps, const InterferenceModel& m) {
  require_valid(m);
  const double perp = orthogonal_density(tau_ps, m);
  return {perp * (1.0 - visibility_kernel(tau_ps, m)), perp};
}

// Fraction of distinguishable-photon coincidences with |τ| ≤ width/2.
inline double coincidence_acceptance(double window_ps, const InterferenceModel& m) {
  require_valid(m);
  detail::require(window_ps > 0.0, "coincidence_acceptance: window must be > 0");
  if (std::isinf(window_ps)) return 1.0;
  const double g1 = m.photon1.gamma, g2 = m.photon2.gamma, h = 0.5 * window_ps;
  const double peak = g1 * g2 / (g1 + g2);
  return peak * (-std::expm1(-g2 * h) / g2 - std::expm1(-g1 * h) / g1);
}

namespace detail {

inline constexpr double kQuadratureTolerance = 1e-9;
inline constexpr double kSupportLifetimes = 20.0;

inline double support_half_width(const InterferenceModel& m) {
  return kSupportLifetimes / std::min(m.photon1.gamma, m.photon2.gamma);
}

template <typename F>
double integrate(F f, double a, double b) {
  if (b <= a) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, kQuadratureTolerance);
}

}  // namespace detail

// Post-selected visibility for coincidences inside a window of full width `window_ps`
// centred on zero delay. An infinite width gives the unfiltered visibility.
inline double window_visibility(double window_ps, const InterferenceModel& m) {
  if (!(window_ps > 0.0)) throw InputError("window_visibility: window must be > 0");
  require_valid(m);
  const double h = std::min(0.5 * window_ps, detail::support_half_width(m));
  auto integrand = [&](double t) { return visibility_kernel(t, m) * orthogonal_density(t, m); };
  const double num = detail::integrate(integrand, -h, 0.0) + detail::integrate(integrand, 0.0, h);
  const double den = coincidence_acceptance(2.0 * h, m);
  if (!(den > 0.0)) return 1.0;
  return std::clamp(num / den, -1.0, 1.0);
}

inline constexpr double kVoigtLorentzCoeff = 0.5346;
inline constexpr double kVoigtQuadCoeff = 0.2166;

// Voigt FWHM (same unit as the inputs) from its Lorentzian and Gaussian parts.
inline double voigt_fwhm(double lorentz_fwhm, double gauss_fwhm) {
  return kVoigtLorentzCoeff * lorentz_fwhm +
         std::sqrt(kVoigtQuadCoeff * lorentz_fwhm * lorentz_fwhm + gauss_fwhm * gauss_fwhm);
}

// Gaussian FWHM left after removing the Fourier-limited Lorentzian from a measured line.
inline double gaussian_fwhm_from_voigt(double fwhm_ghz, double fourier_fwhm_ghz) {
  if (!(fourier_fwhm_ghz > 0.0)) throw InputError("gaussian_sigma_from_fwhm: Fourier limit must be > 0");
  if (!(fwhm_ghz >= fourier_fwhm_ghz * (1.0 - kLinewidthFitTolerance)))
    throw InputError("gaussian_sigma_from_fwhm: linewidth " + std::to_string(fwhm_ghz) +
                     " GHz is below the Fourier limit " + std::to_string(fourier_fwhm_ghz) + " GHz");
  const double excess = fwhm_ghz - kVoigtLorentzCoeff * fourier_fwhm_ghz;
  const double g2 = excess * excess - kVoigtQuadCoeff * fourier_fwhm_ghz * fourier_fwhm_ghz;
  if (excess <= 0.0 || g2 <= 0.0) return 0.0;
  return std::sqrt(g2);
}

// Angular-frequency standard deviation (rad/ps) of the inhomogeneous Gaussian part.
inline double gaussian_sigma_from_fwhm(double fwhm_ghz, double fourier_fwhm_ghz) {
  const double fg = gaussian_fwhm_from_voigt(fwhm_ghz, fourier_fwhm_ghz);
  return units::ghz_to_rad_per_ps(fg / (2.0 * std::sqrt(2.0 * std::log(2.0))));
}

inline WavepacketSpec wavepacket_from_params(const QdParams& qd, double detuning_ghz = 0.0) {
  require_valid(qd);
  return {qd.gamma_xx(), gaussian_sigma_from_fwhm(qd.effective_linewidth_ghz(), qd.fourier_fwhm_ghz()),
          units::ghz_to_rad_per_ps(detuning_ghz)};
}

// XX photon of the single-photon source (photon 1) against the XX photon of the
// pair source (photon 2), offset by `detuning_ghz`; the cascade term uses the
// pair source's X decay.
inline InterferenceModel interference_from_params(const QdParams& sps, const QdParams& eps, double detuning_ghz) {
  return {wavepacket_from_params(sps, 0.0), wavepacket_from_params(eps, detuning_ghz), eps.gamma_x()};
}

}  // namespace qdtele
