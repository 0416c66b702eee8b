#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qdtele/interference.hpp"
#include "qdtele/noise.hpp"
#include "support.hpp"

using namespace qdtele;

namespace {

using big = boost::multiprecision::cpp_bin_float_50;

// Direct (cancellation-prone) form of the bound, evaluated at 50 digits.
double p2_oracle(double g2, double b) {
  const big g(g2), bb(b);
  return static_cast<double>((1 - bb * g - sqrt(1 - 2 * bb * g)) / g);
}

NoiseBudget quiet() {
  NoiseBudget b;
  b.raman_rate_hz = b.dark_rate_hz = b.receiver_dark_rate_hz = 0.0;
  return b;
}

}  // namespace

TEST(P2Bound, Examples) {
  EXPECT_EQ(p2_bound(0.0, 0.3), 0.0);
  EXPECT_NEAR(p2_bound(0.05, 1.0), 0.026334039, 1e-9);
  EXPECT_NEAR(p2_bound(0.05, 0.1), 2.51e-4, 5e-7);
}

TEST(P2Bound, MatchesHighPrecisionOracle) {
  for (double b : {0.01, 0.05, 0.1, 0.5, 1.0})
    for (double g : {1e-6, 1e-3, 0.02, 0.3}) {
      const double expected = p2_oracle(g, b);
      EXPECT_NEAR(p2_bound(g, b), expected, 1e-12 * std::max(1.0, expected)) << b << " " << g;
      EXPECT_NEAR(p2_bound(g, b) / expected, 1.0, 1e-12) << b << " " << g;
    }
}

TEST(P2Bound, SmallG2Limit) {
  // p₂/g² → B²/2; at B = 1 this is 1/2.
  for (double b : {0.01, 0.1, 0.5, 1.0}) EXPECT_NEAR(p2_bound(1e-8, b) / 1e-8, b * b / 2.0, 1e-6) << b;
  EXPECT_NEAR(p2_bound(1e-8, 1.0) / 1e-8, 0.5, 1e-6);
}

TEST(P2Bound, IncreasingInBothArguments) {
  for (double b = 0.05; b <= 1.0; b += 0.05)
    for (double g = 0.01; g + 0.01 <= 0.5 / b; g += 0.01) {
      EXPECT_LT(p2_bound(g, b), p2_bound(g + 0.01, b));
      if (b + 0.05 <= 1.0 && (b + 0.05) * g <= 0.5) {
        EXPECT_LT(p2_bound(g, b), p2_bound(g, b + 0.05));
      }
    }
}

TEST(P2Bound, DomainErrors) {
  EXPECT_THROW(p2_bound(-0.01, 0.5), InputError);
  EXPECT_THROW(p2_bound(0.9, 1.0), DomainError);
  EXPECT_THROW(p2_bound(0.1, 0.0), InputError);
  EXPECT_NO_THROW(p2_bound(0.5, 1.0));
}

TEST(Accidentals, PerWindowProbabilities) {
  EXPECT_NEAR(background_probability(50e3, 70.0) / 3.5e-6, 1.0, 1e-12);
  EXPECT_NEAR(background_probability(300.0, 290.0) / 8.7e-8, 1.0, 1e-12);
  const auto a = accidental_rate(quiet());
  EXPECT_EQ(a.bsm_slot, 0.0);
  EXPECT_EQ(a.receiver_slot, 0.0);
  EXPECT_EQ(a.threefold, 0.0);
}

TEST(Accidentals, SlotSums) {
  NoiseBudget b;
  b.signal_rate_hz = 1e5;
  const auto a = accidental_rate(b);
  EXPECT_NEAR(a.bsm_slot, 2 * 3.5e-6 + 4 * 300.0 * 70e-12, 1e-18);
  EXPECT_NEAR(a.receiver_slot, 2 * 150.0 * 70e-12, 1e-20);
}

TEST(CoincidenceRatio, UnityWithoutNoise) {
  EXPECT_EQ(coincidence_ratio_k(quiet(), {0.0, 0.0}, {0.05, 0.05}), 1.0);
  NoiseBudget b = quiet();
  b.signal_rate_hz = 1e5;
  EXPECT_EQ(coincidence_ratio_k(b, {0.0, 0.0}, {0.05, 0.05}), 1.0);
  EXPECT_LT(coincidence_ratio_k(b, {0.01, 0.0}, {0.05, 0.05}), 1.0);
  b.dark_rate_hz = 1.0;
  EXPECT_LT(coincidence_ratio_k(b, {0.0, 0.0}, {0.05, 0.05}), 1.0);
}

TEST(CoincidenceRatio, DoublingBackgroundsLowersK) {
  NoiseBudget b;
  b.signal_rate_hz = 131600;
  const double k1 = coincidence_ratio_k(b, {0.02, 0.02}, {0.01, 0.01});
  b.raman_rate_hz *= 2;
  b.dark_rate_hz *= 2;
  b.receiver_dark_rate_hz *= 2;
  const double k2 = coincidence_ratio_k(b, {0.02, 0.02}, {0.01, 0.01});
  EXPECT_LT(k2, k1);
  EXPECT_GT(k2, 0.0);
}

TEST(CoincidenceRatio, NonIncreasingInWindow) {
  NoiseBudget b;
  b.signal_rate_hz = 131600;
  double prev = 1.0;
  for (double w = 10.0; w <= 3000.0; w += 10.0) {
    b.window_ps = w;
    const double k = coincidence_ratio_k(b, {0.02, 0.02}, {0.01, 0.01});
    EXPECT_LE(k, prev);
    EXPECT_GE(k, 0.0);
    prev = k;
  }
}

TEST(CoincidenceRatio, CalibratedDefaultProfile) {
  QdParams sps, eps;
  sps.linewidth_ghz = 4.3;
  sps.fourier_limit_ghz = 1.322;
  eps.tau_xx_ps = 176.0;
  eps.linewidth_ghz = 5.2;
  eps.fourier_limit_ghz = 0.903;
  const auto m = interference_from_params(sps, eps, 0.43);
  NoiseBudget b;
  b.window_ps = 70.0;
  b.signal_acceptance = coincidence_acceptance(70.0, m);
  const double rate = calibrate_signal_rate(b, {0.02, 0.02}, {0.01, 0.01}, 0.85);
  b.signal_rate_hz = rate;
  EXPECT_NEAR(coincidence_ratio_k(b, {0.02, 0.02}, {0.01, 0.01}), 0.85, 1e-12);
  // The shipped fixture rounds the calibration to 131.6 kHz.
  EXPECT_NEAR(rate, 131600.0, 50.0);
}

TEST(CalibrateG2, ReproducesTarget) {
  const double g = calibrate_g2(0.05, 0.85);
  EXPECT_NEAR(coincidence_ratio_k(quiet(), {g, g}, {0.05, 0.05}), 0.85, 1e-12);
  EXPECT_NEAR(g, 0.174924, 1e-6);
}

TEST(NoiseBudget, Validation) {
  NoiseBudget b;
  b.dark_rate_hz = -1.0;
  b.window_ps = 0.0;
  const auto v = validate(b, "noise.");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].path, "noise.dark_rate_hz");
  EXPECT_THROW(accidental_rate(b), InputError);
}
