#pragma once

// Quantum-dot emitters: prepared single photons and the XX-X pair state with
// fine-structure precession, cross-dephasing and spin scattering.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qdtele/errors.hpp"
#include "qdtele/polmath.hpp"
#include "qdtele/units.hpp"

namespace qdtele {

struct Violation {
  std::string path;
  std::string message;
};

using Violations = std::vector<Violation>;

// One emitter. Times in ps unless the name says otherwise; infinite dephasing
// times are allowed and switch the corresponding process off.
struct QdParams {
  double tau_x_ps = 171.0;
  double tau_xx_ps = 120.0;
  double fss_uev = 0.0;
  double t2_ps = 35.0;
  double tau_hv_ns = std::numeric_limits<double>::infinity();
  double tau_ss_ns = std::numeric_limits<double>::infinity();
  double linewidth_ghz = 0.0;  // measured Gaussian FWHM; 0 means Fourier limited
  std::optional<double> fourier_limit_ghz;  // measured value; defaults to 1/(2π τ_XX)
  double g2 = 0.0;
  double brightness = 1.0;

  double gamma_x() const { return 1.0 / tau_x_ps; }
  double gamma_xx() const { return 1.0 / tau_xx_ps; }
  double fourier_fwhm_ghz() const { return fourier_limit_ghz.value_or(units::fourier_limit_ghz(tau_xx_ps)); }
  double effective_linewidth_ghz() const {
    return linewidth_ghz > 0.0 ? linewidth_ghz : fourier_fwhm_ghz();
  }
};

// Relative slack on the linewidth-vs-Fourier-limit check.
inline constexpr double kLinewidthFitTolerance = 0.02;

inline Violations validate(const QdParams& p, const std::string& prefix = "") {
  Violations out;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) out.push_back({prefix + name, "must be > 0 (got " + std::to_string(v) + ")"});
  };
  positive(p.tau_x_ps, "tau_x_ps");
  positive(p.tau_xx_ps, "tau_xx_ps");
  positive(p.t2_ps, "t2_ps");
  positive(p.tau_hv_ns, "tau_hv_ns");
  positive(p.tau_ss_ns, "tau_ss_ns");
  if (!(p.fss_uev >= 0.0)) out.push_back({prefix + "fss_uev", "must be >= 0"});
  if (!(p.g2 >= 0.0)) out.push_back({prefix + "g2", "must be >= 0"});
  if (!(p.brightness > 0.0 && p.brightness <= 1.0)) out.push_back({prefix + "brightness", "must lie in (0, 1]"});
  if (p.fourier_limit_ghz && !(*p.fourier_limit_ghz > 0.0))
    out.push_back({prefix + "fourier_limit_ghz", "must be > 0"});
  if (p.linewidth_ghz < 0.0) {
    out.push_back({prefix + "linewidth_ghz", "must be >= 0"});
  } else if (p.linewidth_ghz > 0.0 && p.tau_xx_ps > 0.0 &&
             p.linewidth_ghz < p.fourier_fwhm_ghz() * (1.0 - kLinewidthFitTolerance)) {
    out.push_back({prefix + "linewidth_ghz", "below the Fourier limit " + std::to_string(p.fourier_fwhm_ghz()) + " GHz"});
  }
  return out;
}

inline void require_valid(const QdParams& p) {
  if (auto v = validate(p); !v.empty()) throw InputError("QdParams." + v.front().path + ": " + v.front().message);
}

struct PairState {
  DensityMatrix4 rho;
  double emission_delay_ps;
};

namespace detail {

inline double rate_from_ns(double tau_ns) { return std::isinf(tau_ns) ? 0.0 : 1.0 / units::ns_to_ps(tau_ns); }

// Coherence decay rate (1/ps) and FSS angular frequency (rad/ps).
inline double coherence_decay_rate(const QdParams& p) { return rate_from_ns(p.tau_hv_ns) + rate_from_ns(p.tau_ss_ns); }
inline double fss_angular(const QdParams& p) { return p.fss_uev / units::kHbarUevPs; }

inline Matrix4c pair_matrix(double leak, Complex coherence_vv_hh) {
  Matrix4c m = Matrix4c::Zero();
  m(0, 0) = m(3, 3) = 0.5 * (1.0 - leak);
  m(1, 1) = m(2, 2) = 0.5 * leak;
  m(3, 0) = coherence_vv_hh;
  m(0, 3) = std::conj(coherence_vv_hh);
  return m;
}

// (1 − e^{−z})/z, accurate near z = 0.
inline Complex one_minus_exp_over(Complex z) {
  if (std::abs(z) < 1e-4) return 1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0;
  return (1.0 - std::exp(-z)) / z;
}

}  // namespace detail

// Pair state for XX and X photons emitted a delay t apart.
inline PairState pair_state_at(double t_ps, const QdParams& p) {
  if (!(t_ps >= 0.0)) throw InputError("pair_state_at: emission delay must be >= 0");
  require_valid(p);
  if (std::isinf(t_ps)) {
    const bool decoheres = detail::coherence_decay_rate(p) > 0.0;
    const double leak = detail::rate_from_ns(p.tau_ss_ns) > 0.0 ? 0.5 : 0.0;
    // FSS alone keeps the magnitude; the phase at infinity is undefined, take 0.
    const Complex c = decoheres ? Complex(0.0) : Complex(0.5);
    return {DensityMatrix4::from_matrix(detail::pair_matrix(leak, c)), t_ps};
  }
  const double leak = 0.5 * (1.0 - std::exp(-t_ps * detail::rate_from_ns(p.tau_ss_ns)));
  const double mag = 0.5 * std::exp(-t_ps * detail::coherence_decay_rate(p));
  const Complex c = mag * std::exp(Complex(0.0, detail::fss_angular(p) * t_ps));
  return {DensityMatrix4::from_matrix(detail::pair_matrix(leak, c)), t_ps};
}

// Emission-delay window for time averages. hi may be infinite.
struct TimeWindow {
  double lo_ps = 0.0;
  double hi_ps = std::numeric_limits<double>::infinity();

  static TimeWindow full_decay() { return {}; }
  bool is_full_decay() const { return lo_ps == 0.0 && std::isinf(hi_ps); }
};

// ∫ w(t) ρ(t) dt with w(t) ∝ γ_X e^{−γ_X t} restricted to the window.
// A zero-width window returns the point value pair_state_at(lo).
inline DensityMatrix4 time_averaged_pair_state(const TimeWindow& window, const QdParams& p) {
  require_valid(p);
  if (!(window.lo_ps >= 0.0) || std::isnan(window.hi_ps) || window.hi_ps < window.lo_ps || std::isinf(window.lo_ps))
    throw InputError("time_averaged_pair_state: empty or invalid window");
  if (window.hi_ps == window.lo_ps) return pair_state_at(window.lo_ps, p).rho;

  const double g = p.gamma_x();
  const double width = window.hi_ps - window.lo_ps;
  const double lo = window.lo_ps;

  // E[e^{−a t}] under the truncated exponential weight.
  auto mean_exp = [&](Complex a) -> Complex {
    if (std::isinf(width)) return std::exp(-a * lo) * g / (g + a);
    return std::exp(-a * lo) * detail::one_minus_exp_over((g + a) * width) / detail::one_minus_exp_over(Complex(g * width));
  };

  const double rss = detail::rate_from_ns(p.tau_ss_ns);
  const double leak = 0.5 * (1.0 - mean_exp(rss).real());
  const Complex c = 0.5 * mean_exp(Complex(detail::coherence_decay_rate(p), -detail::fss_angular(p)));
  return DensityMatrix4::from_matrix(detail::pair_matrix(leak, c));
}

inline void require_unitary(const Matrix2c& u, const char* who) {
  if (!u.allFinite() || (u.adjoint() * u - Matrix2c::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw InputError(std::string(who) + ": rotation is not unitary");
}

// Photon 1 after the polarizer and wave plates, optionally rotated by a basis misalignment.
inline PolState prepared_single(PolLabel label, const std::optional<Matrix2c>& basis_rotation = std::nullopt) {
  PolState s = basis_state(label);
  if (!basis_rotation) return s;
  require_unitary(*basis_rotation, "prepared_single");
  return PolState::normalized(*basis_rotation * s.amplitudes());
}

// Spectral overlap of the H and V wave packets of one emitter split by its FSS,
// with Lorentzian XX lines of width γ_XX + γ_X.
inline double fss_mode_overlap(const QdParams& p) {
  const double x = detail::fss_angular(p) / (p.gamma_xx() + p.gamma_x());
  return 1.0 / (1.0 + x * x);
}

}  // namespace qdtele
