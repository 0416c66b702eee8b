#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdtele/interference.hpp"
#include "support.hpp"

using namespace qdtele;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

InterferenceModel equal_gamma(double gamma, double gamma_x) { return {{gamma, 0.0, 0.0}, {gamma, 0.0, 0.0}, gamma_x}; }

InterferenceModel reference_model() {
  QdParams sps, eps;
  sps.tau_xx_ps = 120.0;
  sps.linewidth_ghz = 4.3;
  sps.fourier_limit_ghz = 1.322;
  eps.tau_xx_ps = 176.0;
  eps.linewidth_ghz = 5.2;
  eps.fourier_limit_ghz = 0.903;
  return interference_from_params(sps, eps, 0.43);
}

// FWHM of the numerically convolved Lorentzian (FWHM fl) and Gaussian (FWHM fg).
double numeric_voigt_fwhm(double fl, double fg) {
  using boost::math::quadrature::gauss_kronrod;
  const double gam = 0.5 * fl;
  const double sig = fg / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  auto profile = [&](double x) {
    auto integrand = [&](double y) {
      const double g = std::exp(-0.5 * y * y / (sig * sig)) / (sig * std::sqrt(2.0 * std::numbers::pi));
      const double l = gam / (std::numbers::pi * ((x - y) * (x - y) + gam * gam));
      return g * l;
    };
    return gauss_kronrod<double, 61>::integrate(integrand, -kInf, kInf, 20, 1e-12);
  };
  const double half = 0.5 * profile(0.0);
  double lo = 0.0, hi = 10.0 * (fl + fg);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (profile(mid) > half ? lo : hi) = mid;
  }
  return 2.0 * lo;
}

double integrate_perp(double a, double b, const InterferenceModel& m) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double t) { return orthogonal_density(t, m); };
  return gauss_kronrod<double, 61>::integrate(f, a, 0.0, 20, 1e-13) + gauss_kronrod<double, 61>::integrate(f, 0.0, b, 20, 1e-13);
}

}  // namespace

TEST(CascadeBound, Examples) {
  EXPECT_NEAR(cascade_visibility_bound(1.0 / 120.0, 1.0 / 171.0), 0.588, 0.005);
  EXPECT_DOUBLE_EQ(cascade_visibility_bound(0.01, 0.01), 0.5);
  EXPECT_NEAR(cascade_visibility_bound(5.0, 1.0), 0.833, 0.001);
  EXPECT_THROW(cascade_visibility_bound(0.0, 1.0), InputError);
  EXPECT_THROW(cascade_visibility_bound(1.0, -1.0), InputError);
}

TEST(VisibilityKernel, Examples) {
  EXPECT_DOUBLE_EQ(visibility_kernel(0.0, reference_model()), 1.0);
  EXPECT_NEAR(visibility_kernel(171.0, equal_gamma(1.0 / 150.0, 1.0 / 171.0)), std::exp(-1.0), 1e-15);
}

TEST(VisibilityKernel, IntegratedAgainstOrthogonalDensityGivesCascadeBound) {
  using boost::math::quadrature::gauss_kronrod;
  const double gxx = 1.0 / 120.0, gx = 1.0 / 171.0;
  const auto m = equal_gamma(gxx, gx);
  auto f = [&](double t) { return visibility_kernel(t, m) * orthogonal_density(t, m); };
  const double num = gauss_kronrod<double, 61>::integrate(f, -kInf, 0.0, 20, 1e-13) +
                     gauss_kronrod<double, 61>::integrate(f, 0.0, kInf, 20, 1e-13);
  EXPECT_NEAR(num / integrate_perp(-kInf, kInf, m), cascade_visibility_bound(gxx, gx), 1e-10);
}

TEST(CoincidenceDensities, Examples) {
  const auto m = equal_gamma(1.0 / 150.0, 1.0 / 171.0);
  EXPECT_DOUBLE_EQ(coincidence_densities(0.0, m).parallel, 0.0);
  const auto d = coincidence_densities(100.0, m);
  EXPECT_NEAR(d.parallel / d.orthogonal, 1.0 - std::exp(-100.0 / 171.0), 1e-12);
  EXPECT_NEAR(d.parallel / d.orthogonal, 0.44278, 1e-5);
  const auto far = coincidence_densities(20000.0, reference_model());
  EXPECT_NEAR(far.parallel / far.orthogonal, 1.0, 1e-12);
}

TEST(CoincidenceDensities, ParallelBoundedByOrthogonal) {
  const auto m = reference_model();
  for (double t = -3000.0; t <= 3000.0; t += 7.3) {
    const auto d = coincidence_densities(t, m);
    if (visibility_kernel(t, m) < 0.0) continue;
    EXPECT_GE(d.parallel, 0.0);
    EXPECT_LE(d.parallel, d.orthogonal);
  }
}

TEST(CoincidenceDensities, OrthogonalNormalizedAndTwoSided) {
  const auto m = reference_model();
  EXPECT_NEAR(integrate_perp(-kInf, kInf, m), 1.0, 1e-6);
  // Closed-form acceptance agrees with quadrature of the density.
  for (double w : {10.0, 70.0, 290.0, 1000.0}) EXPECT_NEAR(coincidence_acceptance(w, m), integrate_perp(-w / 2, w / 2, m), 1e-9);
  // Continuous at zero delay for unequal rates.
  EXPECT_NEAR(orthogonal_density(1e-12, m), orthogonal_density(-1e-12, m), 1e-14);
}

TEST(WindowVisibility, SmallWindowRecoversUnity) {
  EXPECT_NEAR(window_visibility(1e-3, reference_model()), 1.0, 1e-5);
  EXPECT_GT(window_visibility(1e-3, reference_model()), window_visibility(1e-2, reference_model()));
}

TEST(WindowVisibility, NonPositiveWindowThrows) {
  EXPECT_THROW(window_visibility(0.0, reference_model()), InputError);
  EXPECT_THROW(window_visibility(-5.0, reference_model()), InputError);
}

TEST(WindowVisibility, Figure2Parameters) {
  const auto m = reference_model();
  EXPECT_NEAR(window_visibility(70.0, m), 0.79, 0.08);
  EXPECT_NEAR(window_visibility(2000.0, m), 0.30, 0.08);
  EXPECT_NEAR(window_visibility(kInf, m), window_visibility(1e6, m), 1e-9);
}

TEST(WindowVisibility, NonIncreasingInWidth) {
  const auto m = reference_model();
  const double beat = std::abs(m.photon1.detuning - m.photon2.detuning);
  double prev = 1.0 + 1e-12;
  for (double w = 10.0; w <= 2000.0; w += 10.0) {
    if (beat * w > std::numbers::pi) break;
    const double v = window_visibility(w, m);
    EXPECT_LE(v, prev + 1e-9) << w;
    prev = v;
  }
}

TEST(WindowVisibility, LargeWindowLimitIsCascadeBound) {
  const double gxx = 1.0 / 120.0, gx = 1.0 / 171.0;
  EXPECT_NEAR(window_visibility(kInf, equal_gamma(gxx, gx)), cascade_visibility_bound(gxx, gx), 1e-4);
  EXPECT_NEAR(window_visibility(1e5, equal_gamma(gxx, gx)), cascade_visibility_bound(gxx, gx), 1e-4);
}

TEST(GaussianSigma, FourierLimitedLineHasNoJitter) {
  EXPECT_EQ(gaussian_sigma_from_fwhm(1.322, 1.322), 0.0);
  EXPECT_THROW(gaussian_sigma_from_fwhm(1.0, 1.322), InputError);
}

TEST(GaussianSigma, ForwardConvolutionRecoversMeasuredLine) {
  for (auto [fwhm, fourier] : {std::pair{4.3, 1.322}, std::pair{5.2, 0.903}}) {
    const double fg = gaussian_fwhm_from_voigt(fwhm, fourier);
    EXPECT_NEAR(voigt_fwhm(fourier, fg), fwhm, 1e-12);
    EXPECT_NEAR(numeric_voigt_fwhm(fourier, fg) / fwhm, 1.0, 0.02);
    const double sigma = gaussian_sigma_from_fwhm(fwhm, fourier);
    EXPECT_NEAR(sigma, units::kTwoPi * fg / (2.0 * std::sqrt(2.0 * std::log(2.0))) * 1e-3, 1e-15);
  }
}

TEST(InterferenceFromParams, UsesPairSourceExcitonForCascadeTerm) {
  QdParams sps, eps;
  sps.tau_x_ps = 500.0;
  eps.tau_x_ps = 171.0;
  const auto m = interference_from_params(sps, eps, 0.43);
  EXPECT_DOUBLE_EQ(m.gamma_x, 1.0 / 171.0);
  EXPECT_DOUBLE_EQ(m.photon1.gamma, 1.0 / 120.0);
  EXPECT_NEAR(m.photon2.detuning - m.photon1.detuning, units::ghz_to_rad_per_ps(0.43), 1e-15);
}
