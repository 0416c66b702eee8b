#pragma once

// Photon-statistics bookkeeping for three-fold coincidences: the two-photon
// bound from g²(0) and brightness, background accidentals, and the ratio k of
// wanted to all detected three-fold coincidences.

#include <cmath>
#include <string>
#include <utility>

#include "qdtele/errors.hpp"
#include "qdtele/qdsource.hpp"
#include "qdtele/units.hpp"

namespace qdtele {

// Upper bound on the two-photon probability assuming no higher photon numbers:
//   p₂ ≤ (1 − B g² − √(1 − 2 B g²)) / g²
// evaluated in the cancellation-free form B² g² / ((1 − B g²) + √(1 − 2 B g²)).
inline double p2_bound(double g2, double brightness) {
  if (!(g2 >= 0.0)) throw InputError("p2_bound: g2 must be >= 0");
  if (!(brightness > 0.0 && brightness <= 1.0)) throw InputError("p2_bound: brightness must lie in (0, 1]");
  const double x = brightness * g2;
  const double radicand = 1.0 - 2.0 * x;
  if (radicand < 0.0) throw DomainError("p2_bound: B*g2 exceeds 1/2, radicand negative");
  if (g2 == 0.0) return 0.0;
  return brightness * brightness * g2 / ((1.0 - x) + std::sqrt(radicand));
}

// Rates in Hz, window in ps. Detector counts describe the BSM (telecom) and
// receiver (photon 3) stations.
struct NoiseBudget {
  double signal_rate_hz = 0.0;  // detected single-photon rate per channel
  double raman_rate_hz = 50e3;  // per converter
  int converters = 2;
  double dark_rate_hz = 300.0;  // per BSM detector
  int bsm_detectors = 4;
  double receiver_dark_rate_hz = 150.0;  // per receiver detector
  int receiver_detectors = 2;
  double repetition_rate_hz = 304.8e6;
  double window_ps = 70.0;
  double signal_acceptance = 1.0;  // fraction of true coincidences inside the window

  double signal_probability() const { return signal_rate_hz / repetition_rate_hz; }
};

inline Violations validate(const NoiseBudget& b, const std::string& prefix = "") {
  Violations out;
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0)) out.push_back({prefix + name, "must be >= 0"});
  };
  nonneg(b.signal_rate_hz, "signal_rate_hz");
  nonneg(b.raman_rate_hz, "raman_rate_hz");
  nonneg(b.dark_rate_hz, "dark_rate_hz");
  nonneg(b.receiver_dark_rate_hz, "receiver_dark_rate_hz");
  if (b.converters < 0) out.push_back({prefix + "converters", "must be >= 0"});
  if (b.bsm_detectors < 0) out.push_back({prefix + "bsm_detectors", "must be >= 0"});
  if (b.receiver_detectors < 0) out.push_back({prefix + "receiver_detectors", "must be >= 0"});
  if (!(b.repetition_rate_hz > 0.0)) out.push_back({prefix + "repetition_rate_hz", "must be > 0"});
  if (!(b.window_ps > 0.0)) out.push_back({prefix + "window_ps", "must be > 0"});
  if (!(b.signal_acceptance > 0.0 && b.signal_acceptance <= 1.0))
    out.push_back({prefix + "signal_acceptance", "must lie in (0, 1]"});
  if (b.signal_rate_hz > b.repetition_rate_hz)
    out.push_back({prefix + "signal_rate_hz", "exceeds the repetition rate"});
  return out;
}

inline void require_valid(const NoiseBudget& b) {
  if (auto v = validate(b); !v.empty()) throw InputError("NoiseBudget." + v.front().path + ": " + v.front().message);
}

// Probability of at least one uncorrelated click from a Poisson source inside the window (first order).
inline double background_probability(double rate_hz, double window_ps) { return rate_hz * units::ps_to_s(window_ps); }

struct AccidentalProbabilities {
  double raman_per_converter;
  double dark_per_detector;
  double bsm_slot;       // false click standing in for photon 1 or photon 2
  double receiver_slot;  // false click standing in for photon 3
  double threefold;      // per pulse: one false click plus two true photons
};

inline AccidentalProbabilities accidental_rate(const NoiseBudget& b) {
  require_valid(b);
  AccidentalProbabilities a{};
  a.raman_per_converter = background_probability(b.raman_rate_hz, b.window_ps);
  a.dark_per_detector = background_probability(b.dark_rate_hz, b.window_ps);
  a.bsm_slot = b.converters * a.raman_per_converter + b.bsm_detectors * a.dark_per_detector;
  a.receiver_slot = b.receiver_detectors * background_probability(b.receiver_dark_rate_hz, b.window_ps);
  const double p = b.signal_probability();
  // Photons 2 and 3 come from one pair, so only the photon 1-2 delay carries the acceptance.
  a.threefold = p * p * (2.0 * a.bsm_slot + b.signal_acceptance * a.receiver_slot);
  return a;
}

struct CoincidenceBreakdown {
  double wanted;
  double multi_photon;
  double accidental;

  double k() const {
    const double total = wanted + multi_photon + accidental;
    return total > 0.0 ? wanted / total : 1.0;
  }
};

// Per-pulse three-fold probabilities. g2 and brightness are (single-photon source, pair source).
inline CoincidenceBreakdown coincidence_breakdown(const NoiseBudget& b, std::pair<double, double> g2,
                                                  std::pair<double, double> brightness) {
  require_valid(b);
  const double p = b.signal_probability();
  const double wanted = p * p * p * b.signal_acceptance;
  // A second photon from either source replaces the photon the other source should have sent.
  const double multi_ratio = (p2_bound(g2.first, brightness.first) + p2_bound(g2.second, brightness.second)) /
                             (brightness.first * brightness.second);
  const auto acc = accidental_rate(b);
  if (wanted == 0.0 && (acc.bsm_slot > 0.0 || acc.receiver_slot > 0.0))
    throw InputError("coincidence_ratio_k: signal_rate_hz must be > 0 when backgrounds are present");
  return {wanted, wanted * multi_ratio, acc.threefold};
}

inline double coincidence_ratio_k(const NoiseBudget& b, std::pair<double, double> g2,
                                  std::pair<double, double> brightness) {
  if (b.signal_rate_hz == 0.0) {
    const auto acc = accidental_rate(b);
    if (acc.bsm_slot == 0.0 && acc.receiver_slot == 0.0) {
      const double multi = (p2_bound(g2.first, brightness.first) + p2_bound(g2.second, brightness.second)) /
                           (brightness.first * brightness.second);
      return 1.0 / (1.0 + multi);
    }
  }
  return coincidence_breakdown(b, g2, brightness).k();
}

// Signal rate at which coincidence_ratio_k hits `target_k` for the given budget
// (all other fields fixed). Used to build calibrated default profiles.
inline double calibrate_signal_rate(NoiseBudget b, std::pair<double, double> g2, std::pair<double, double> brightness,
                                    double target_k) {
  detail::require(target_k > 0.0 && target_k < 1.0, "calibrate_signal_rate: target k must lie in (0, 1)");
  b.signal_rate_hz = 0.0;
  const double multi = (p2_bound(g2.first, brightness.first) + p2_bound(g2.second, brightness.second)) /
                       (brightness.first * brightness.second);
  const double slack = 1.0 / target_k - 1.0 - multi;
  if (!(slack > 0.0)) throw DomainError("calibrate_signal_rate: multi-photon events alone push k below the target");
  const auto acc = accidental_rate(b);
  // accidental/wanted = (2·bsm + a·receiver) / (p·a)
  const double p = (2.0 * acc.bsm_slot + b.signal_acceptance * acc.receiver_slot) / (b.signal_acceptance * slack);
  return p * b.repetition_rate_hz;
}

// g²(0), applied to both sources, that gives `target_k` with no backgrounds.
inline double calibrate_g2(double brightness, double target_k) {
  detail::require(target_k > 0.0 && target_k < 1.0, "calibrate_g2: target k must lie in (0, 1)");
  double lo = 0.0, hi = 0.5 / brightness;
  auto k_of = [&](double g) { return 1.0 / (1.0 + 2.0 * p2_bound(g, brightness) / (brightness * brightness)); };
  if (k_of(hi) > target_k) throw DomainError("calibrate_g2: target k unreachable");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (k_of(mid) > target_k ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qdtele
