#pragma once

// Teleportation channel from photon 1 onto photon 3.
//
// Pipeline for one configuration:
//   1. pair state of the entangled source, averaged over the X emission delay
//   2. TPI visibility V for the post-selection window (or an override)
//   3. ρ_raw ∝ Tr₁₂[(Π_eff ⊗ I)(ρ_in ⊗ ρ_pair)]
//   4. mode-overlap mixture ρ ← M_p ρ + (1 − M_p) |H⟩⟨H|, where |H⟩ is the
//      teleported-frame target, i.e. the heralded image of |H⟩ before correction
//   5. noise admixture ρ ← k ρ + (1 − k) I/2
//   6. optional Pauli correction for the heralded outcome

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qdtele/bsm.hpp"
#include "qdtele/errors.hpp"
#include "qdtele/interference.hpp"
#include "qdtele/noise.hpp"
#include "qdtele/parallel.hpp"
#include "qdtele/polmath.hpp"
#include "qdtele/qdsource.hpp"
#include "qdtele/units.hpp"

namespace qdtele {

struct TeleportConfig {
  PolState input = basis_state(PolLabel::H);
  BellOutcome outcome = BellOutcome::PsiMinus;
  double window_ps = std::numeric_limits<double>::infinity();
  QdParams qd1;  // single-photon source
  QdParams qd2;  // entangled-pair source
  double detuning_ghz = 0.0;
  double mode_overlap_mp = 1.0;
  std::optional<double> coincidence_ratio_k;  // fixed k; otherwise from `noise`
  NoiseBudget noise;
  std::optional<double> visibility_override;
  bool apply_correction = true;
  TimeWindow pair_window = TimeWindow::full_decay();
};

inline Violations validate(const TeleportConfig& c, const std::string& prefix = "") {
  Violations out = validate(c.qd1, prefix + "qd1.");
  for (auto& v : validate(c.qd2, prefix + "qd2.")) out.push_back(std::move(v));
  auto unit = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) out.push_back({prefix + name, "must lie in [0, 1] (got " + std::to_string(v) + ")"});
  };
  unit(c.mode_overlap_mp, "mode_overlap_mp");
  if (c.coincidence_ratio_k) unit(*c.coincidence_ratio_k, "coincidence_ratio_k");
  if (c.visibility_override) unit(*c.visibility_override, "visibility_override");
  if (!(c.window_ps > 0.0)) out.push_back({prefix + "window_ps", "must be > 0"});
  if (c.outcome != BellOutcome::PsiPlus && c.outcome != BellOutcome::PsiMinus)
    out.push_back({prefix + "outcome", "only PsiPlus and PsiMinus are heralded"});
  if (!c.coincidence_ratio_k) {
    NoiseBudget b = c.noise;
    b.window_ps = 1.0;  // the window is set per evaluation
    for (auto& v : validate(b, prefix + "noise.")) out.push_back(std::move(v));
  }
  return out;
}

inline void require_valid(const TeleportConfig& c) {
  if (auto v = validate(c); !v.empty()) throw InputError(v.front().path + ": " + v.front().message);
}

inline InterferenceModel interference_model(const TeleportConfig& c) {
  return interference_from_params(c.qd1, c.qd2, c.detuning_ghz);
}

inline double effective_visibility(const TeleportConfig& c) {
  if (c.visibility_override) return *c.visibility_override;
  return window_visibility(c.window_ps, interference_model(c));
}

inline double effective_k(const TeleportConfig& c) {
  if (c.coincidence_ratio_k) return *c.coincidence_ratio_k;
  const InterferenceModel m = interference_model(c);
  NoiseBudget b = c.noise;
  b.window_ps = std::isinf(c.window_ps) ? 2.0 * detail::support_half_width(m) : c.window_ps;
  b.signal_acceptance = coincidence_acceptance(b.window_ps, m);
  return coincidence_ratio_k(b, {c.qd1.g2, c.qd2.g2}, {c.qd1.brightness, c.qd2.brightness});
}

struct TeleportEvaluation {
  DensityMatrix2 rho;
  double visibility;
  double k;
  double herald_probability;  // Tr[(Π ⊗ I)(ρ_in ⊗ ρ_pair)]
};

namespace detail {

using Matrix8c = Eigen::Matrix<Complex, 8, 8>;

inline Matrix8c kron(const Matrix2c& a, const Matrix4c& b) {
  Matrix8c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

inline Matrix8c kron(const Matrix4c& a, const Matrix2c& b) {
  Matrix8c out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// Tr over photons 1 and 2 of an operator on (1, 2, 3) with photon 3 fastest.
inline Matrix2c trace_out_first_two(const Matrix8c& m) {
  Matrix2c out = Matrix2c::Zero();
  for (int ab = 0; ab < 4; ++ab) out += m.block<2, 2>(2 * ab, 2 * ab);
  return out;
}

}  // namespace detail

inline TeleportEvaluation evaluate_teleport(const TeleportConfig& c) {
  require_valid(c);
  const DensityMatrix4 pair = time_averaged_pair_state(c.pair_window, c.qd2);
  const double vis = effective_visibility(c);
  const double k = effective_k(c);
  const BsmProjector proj = effective_projector(c.outcome, vis);

  const Matrix2c rho_in = density_from_pure(c.input).matrix();
  const detail::Matrix8c joint = detail::kron(rho_in, pair.matrix());
  const detail::Matrix8c herald = detail::kron(proj.effective_operator, Matrix2c::Identity());
  const Matrix2c raw = detail::trace_out_first_two(herald * joint);
  const double p_herald = raw.trace().real();
  if (!(p_herald > 1e-15)) throw DegenerateConfigError("teleported_state: outcome is heralded with zero probability");

  const Matrix2c herald_op = heralded_operator(c.outcome);
  const Vector2c h_heralded = herald_op * basis_state(PolLabel::H).amplitudes();

  Matrix2c rho = raw / p_herald;
  rho = c.mode_overlap_mp * rho + (1.0 - c.mode_overlap_mp) * (h_heralded * h_heralded.adjoint());
  rho = k * rho + (1.0 - k) * 0.5 * Matrix2c::Identity();
  if (c.apply_correction) {
    const Matrix2c u = correction_unitary(c.outcome);
    rho = u * rho * u.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint());
  return {DensityMatrix2::from_matrix(rho), vis, k, p_herald};
}

inline DensityMatrix2 teleported_state(const TeleportConfig& c) { return evaluate_teleport(c).rho; }

struct ConjugateFidelities {
  double f_h;
  double f_d;
  double f_r;
  double f_bar() const { return (f_h + f_d + f_r) / 3.0; }
};

inline constexpr std::array<PolLabel, 3> kConjugateInputs = {PolLabel::H, PolLabel::D, PolLabel::R};

inline ConjugateFidelities conjugate_fidelities(const TeleportConfig& c) {
  std::array<double, 3> f{};
  for (std::size_t i = 0; i < kConjugateInputs.size(); ++i) {
    TeleportConfig ci = c;
    ci.input = basis_state(kConjugateInputs[i]);
    ci.apply_correction = true;
    f[i] = fidelity(teleported_state(ci), ci.input);
  }
  return {f[0], f[1], f[2]};
}

struct CurvePoint {
  double window_ps;
  double f_bar;
  double visibility;
  double k;
  ConjugateFidelities fidelities;
};

struct FidelityCurve {
  std::vector<CurvePoint> points;
  // Linearly interpolated window at which f̄ first crosses the classical threshold.
  std::optional<double> threshold_crossing_ps;
};

inline FidelityCurve average_fidelity_curve(const TeleportConfig& c, const std::vector<double>& windows,
                                            unsigned workers = 1) {
  detail::require(!windows.empty(), "average_fidelity_curve: no windows given");
  for (double w : windows) detail::require(w > 0.0, "average_fidelity_curve: windows must be > 0");
  FidelityCurve curve;
  curve.points.resize(windows.size());
  detail::parallel_for(
      windows.size(),
      [&](std::size_t i) {
        TeleportConfig ci = c;
        ci.window_ps = windows[i];
        const auto f = conjugate_fidelities(ci);
        curve.points[i] = {windows[i], f.f_bar(), effective_visibility(ci), effective_k(ci), f};
      },
      workers);
  const double thr = units::kClassicalFidelityThreshold;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    if ((a.f_bar - thr) * (b.f_bar - thr) <= 0.0 && a.f_bar != b.f_bar) {
      curve.threshold_crossing_ps = a.window_ps + (thr - a.f_bar) * (b.window_ps - a.window_ps) / (b.f_bar - a.f_bar);
      break;
    }
  }
  return curve;
}

// Interval of poorly known source parameters, evaluated at its corners.
struct ParameterBand {
  double mp_lo = 0.8, mp_hi = 0.9;
  double tau_lo_ns = 1.0, tau_hi_ns = 10.0;
};

struct BandPoint {
  double window_ps;
  double f_bar_min;
  double f_bar_max;
};

inline std::vector<BandPoint> average_fidelity_band(const TeleportConfig& c, const std::vector<double>& windows,
                                                    const ParameterBand& band, unsigned workers = 1) {
  detail::require(band.mp_lo <= band.mp_hi && band.tau_lo_ns <= band.tau_hi_ns, "average_fidelity_band: empty band");
  std::vector<TeleportConfig> corners;
  for (double mp : {band.mp_lo, band.mp_hi})
    for (double thv : {band.tau_lo_ns, band.tau_hi_ns})
      for (double tss : {band.tau_lo_ns, band.tau_hi_ns}) {
        TeleportConfig ci = c;
        ci.mode_overlap_mp = mp;
        ci.qd2.tau_hv_ns = thv;
        ci.qd2.tau_ss_ns = tss;
        corners.push_back(ci);
      }
  std::vector<FidelityCurve> curves(corners.size());
  detail::parallel_for(
      corners.size(), [&](std::size_t i) { curves[i] = average_fidelity_curve(corners[i], windows, 1); }, workers);
  std::vector<BandPoint> out;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    BandPoint p{windows[w], 1.0, 0.0};
    for (const auto& cv : curves) {
      p.f_bar_min = std::min(p.f_bar_min, cv.points[w].f_bar);
      p.f_bar_max = std::max(p.f_bar_max, cv.points[w].f_bar);
    }
    out.push_back(p);
  }
  return out;
}

struct Fig5Scenario {
  std::string label;
  std::array<double, 2> linewidth_ghz{0.0, 0.0};  // 0 = Fourier limited
  std::array<double, 2> tau_xx_ps{120.0, 176.0};
  double fss_uev = 0.0;
  double g2 = 0.0;
  std::optional<double> visibility_override;
};

// Parameters shared by all scenarios of the grid.
struct Fig5Defaults {
  double tau_x_ps = 171.0;
  double t2_ps = 35.0;
  double tau_hv_ns = 10.0;
  double tau_ss_ns = 10.0;
  double brightness = 0.05;
  double detuning_ghz = 0.0;
  double birefringence_mp = 1.0;  // multiplies the FSS mode overlap
};

struct Fig5Row {
  Fig5Scenario scenario;
  double visibility;
  double k;
  double mode_overlap_mp;
  double f_bar;
};

inline Violations validate(const Fig5Scenario& s, const std::string& prefix = "") {
  Violations out;
  for (int i = 0; i < 2; ++i) {
    if (!(s.tau_xx_ps[i] > 0.0)) out.push_back({prefix + "tau_xx_ps", "must be > 0"});
    if (!(s.linewidth_ghz[i] >= 0.0)) out.push_back({prefix + "linewidth_ghz", "must be >= 0"});
  }
  if (!(s.fss_uev >= 0.0)) out.push_back({prefix + "fss_uev", "must be >= 0"});
  if (!(s.g2 >= 0.0)) out.push_back({prefix + "g2", "must be >= 0"});
  if (s.visibility_override && !(*s.visibility_override >= 0.0 && *s.visibility_override <= 1.0))
    out.push_back({prefix + "visibility_override", "must lie in [0, 1]"});
  return out;
}

// Average fidelity without temporal post-selection for each scenario.
inline std::vector<Fig5Row> fig5_grid(const std::vector<Fig5Scenario>& scenarios, const Fig5Defaults& d = {},
                                      unsigned workers = 1) {
  for (const auto& s : scenarios)
    if (auto v = validate(s); !v.empty())
      throw InputError("fig5 scenario '" + s.label + "': " + v.front().path + " " + v.front().message);
  std::vector<Fig5Row> rows(scenarios.size());
  detail::parallel_for(
      scenarios.size(),
      [&](std::size_t i) {
        const auto& s = scenarios[i];
        TeleportConfig c;
        for (int q = 0; q < 2; ++q) {
          QdParams& p = q == 0 ? c.qd1 : c.qd2;
          p.tau_x_ps = d.tau_x_ps;
          p.tau_xx_ps = s.tau_xx_ps[q];
          p.t2_ps = d.t2_ps;
          p.tau_hv_ns = d.tau_hv_ns;
          p.tau_ss_ns = d.tau_ss_ns;
          p.linewidth_ghz = s.linewidth_ghz[q];
          p.g2 = s.g2;
          p.brightness = d.brightness;
        }
        c.qd2.fss_uev = s.fss_uev;
        c.detuning_ghz = d.detuning_ghz;
        c.window_ps = std::numeric_limits<double>::infinity();
        c.visibility_override = s.visibility_override;
        c.mode_overlap_mp = d.birefringence_mp * fss_mode_overlap(c.qd2);
        NoiseBudget quiet;
        quiet.raman_rate_hz = quiet.dark_rate_hz = quiet.receiver_dark_rate_hz = 0.0;
        c.noise = quiet;
        c.coincidence_ratio_k = coincidence_ratio_k(quiet, {s.g2, s.g2}, {d.brightness, d.brightness});
        rows[i] = {s, effective_visibility(c), *c.coincidence_ratio_k, c.mode_overlap_mp, conjugate_fidelities(c).f_bar()};
      },
      workers);
  return rows;
}

}  // namespace qdtele
