#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdtele/qdsource.hpp"
#include "support.hpp"

using namespace qdtele;
using qdtele::testing::is_physical;
using qdtele::testing::max_abs_diff;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QdParams clean(double fss = 0.0) {
  QdParams p;
  p.fss_uev = fss;
  return p;
}

double coherence(const Matrix4c& m) { return std::abs(m(3, 0)); }

// Element-wise quadrature of the X-decay-weighted average of pair_state_at.
Matrix4c quadrature_average(double lo, double hi, const QdParams& p) {
  using boost::math::quadrature::gauss_kronrod;
  const double g = p.gamma_x();
  const double norm = std::exp(-g * lo) - (std::isinf(hi) ? 0.0 : std::exp(-g * hi));
  Matrix4c out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      auto re = [&](double t) { return g * std::exp(-g * t) * pair_state_at(t, p).rho(r, c).real(); };
      auto im = [&](double t) { return g * std::exp(-g * t) * pair_state_at(t, p).rho(r, c).imag(); };
      out(r, c) = Complex(gauss_kronrod<double, 61>::integrate(re, lo, hi, 20, 1e-13),
                          gauss_kronrod<double, 61>::integrate(im, lo, hi, 20, 1e-13)) /
                  norm;
    }
  return out;
}

}  // namespace

TEST(QdParams, DefaultsAreValid) { EXPECT_TRUE(validate(QdParams{}).empty()); }

TEST(QdParams, ViolationsNameTheField) {
  QdParams p;
  p.tau_x_ps = -1.0;
  auto v = validate(p, "qd1.");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].path, "qd1.tau_x_ps");

  p = QdParams{};
  p.brightness = 0.0;
  p.g2 = -0.1;
  EXPECT_EQ(validate(p).size(), 2u);
}

TEST(QdParams, LinewidthBelowFourierLimitRejected) {
  QdParams p;
  p.fourier_limit_ghz = 1.322;
  p.linewidth_ghz = 1.0;
  ASSERT_EQ(validate(p).size(), 1u);
  p.linewidth_ghz = 1.322 * 0.99;  // inside fit tolerance
  EXPECT_TRUE(validate(p).empty());
}

TEST(PairState, BellStateAtZeroDelay) {
  QdParams p = clean(10.0);
  p.tau_hv_ns = 5.0;
  p.tau_ss_ns = 5.0;
  const Vector4c phi = bell_state(BellOutcome::PhiPlus);
  EXPECT_LT(max_abs_diff(pair_state_at(0.0, p).rho.matrix(), Matrix4c(phi * phi.adjoint())), 1e-12);
}

TEST(PairState, FullyDecoheredAtInfiniteDelay) {
  QdParams p = clean(2.1);
  p.tau_hv_ns = 5.0;
  p.tau_ss_ns = 5.0;
  EXPECT_LT(max_abs_diff(pair_state_at(kInf, p).rho.matrix(), Matrix4c(Matrix4c::Identity() / 4.0)), 1e-15);
}

TEST(PairState, SpinScatteringLifetimeExample) {
  QdParams p = clean();
  p.tau_ss_ns = 2.0;
  const Matrix4c m = pair_state_at(2000.0, p).rho.matrix();
  const double s = (1.0 - std::exp(-1.0)) / 2.0;
  EXPECT_NEAR(coherence(m), 0.5 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(m(1, 1).real(), s / 2.0, 1e-12);
  EXPECT_NEAR(m(0, 0).real(), (1.0 - s) / 2.0, 1e-12);
}

TEST(PairState, FssPhaseAdvancesWithDelay) {
  const QdParams p = clean(2.1);
  const double t = 100.0;
  const Complex c = pair_state_at(t, p).rho(3, 0);
  EXPECT_NEAR(std::arg(c), 2.1 * t / units::kHbarUevPs, 1e-12);
  EXPECT_NEAR(std::abs(c), 0.5, 1e-12);
}

TEST(PairState, NegativeDelayThrows) { EXPECT_THROW(pair_state_at(-1.0, clean()), InputError); }

TEST(PairState, PhysicalAndMonotoneForRandomParams) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> tau(0.1, 20.0), fss(0.0, 20.0), t(0.0, 5000.0);
  for (int i = 0; i < 300; ++i) {
    QdParams p = clean(fss(rng));
    p.tau_hv_ns = tau(rng);
    p.tau_ss_ns = tau(rng);
    double prev = 1.0;
    for (double tt = 0.0; tt <= 3000.0; tt += 150.0) {
      const Matrix4c m = pair_state_at(tt, p).rho.matrix();
      ASSERT_TRUE(is_physical(m));
      EXPECT_LE(coherence(m), prev + 1e-15);
      prev = coherence(m);
    }
    EXPECT_TRUE(is_physical(pair_state_at(t(rng), p).rho.matrix()));
  }
}

TEST(PairState, ConcurrenceNonIncreasingWithoutFss) {
  QdParams p = clean();
  p.tau_hv_ns = 1.5;
  p.tau_ss_ns = 3.0;
  double prev = 1.0 + 1e-12;
  for (double t = 0.0; t <= 10000.0; t += 250.0) {
    const double c = concurrence(pair_state_at(t, p).rho);
    EXPECT_LE(c, prev + 1e-12);
    prev = c;
  }
}

TEST(TimeAverage, NoFssNoDephasingIsBellState) {
  const Vector4c phi = bell_state(BellOutcome::PhiPlus);
  EXPECT_LT(max_abs_diff(time_averaged_pair_state(TimeWindow::full_decay(), clean()).matrix(),
                         Matrix4c(phi * phi.adjoint())),
            1e-12);
}

TEST(TimeAverage, FullDecayCoherenceClosedForm) {
  // ½/√(1 + (δτ_X/ħ)²): 0.8778 of the maximum for 2.1 µeV, 0.1796 absolute for 10 µeV.
  const Matrix4c m21 = time_averaged_pair_state(TimeWindow::full_decay(), clean(2.1)).matrix();
  EXPECT_NEAR(coherence(m21), 0.5 * 0.877853, 1e-6);
  EXPECT_NEAR(concurrence(Matrix4c(m21)), 0.877853, 1e-6);
  EXPECT_NEAR(coherence(time_averaged_pair_state(TimeWindow::full_decay(), clean(10.0)).matrix()), 0.179613, 1e-6);
}

TEST(TimeAverage, MatchesQuadrature) {
  QdParams p = clean(2.1);
  p.tau_hv_ns = 5.0;
  p.tau_ss_ns = 1.0;
  for (auto [lo, hi] : {std::pair{0.0, kInf}, std::pair{0.0, 300.0}, std::pair{50.0, 900.0}, std::pair{400.0, kInf}}) {
    const Matrix4c expected = quadrature_average(lo, hi, p);
    const Matrix4c got = time_averaged_pair_state({lo, hi}, p).matrix();
    EXPECT_LT(max_abs_diff(got, expected), 1e-6 * 0.5) << lo << ".." << hi;
  }
}

TEST(TimeAverage, DegenerateWindowIsPointValue) {
  QdParams p = clean(10.0);
  p.tau_hv_ns = 3.0;
  p.tau_ss_ns = 7.0;
  for (double t : {0.0, 40.0, 500.0}) {
    EXPECT_LT(max_abs_diff(time_averaged_pair_state({t, t}, p).matrix(), pair_state_at(t, p).rho.matrix()), 1e-9);
    EXPECT_LT(max_abs_diff(time_averaged_pair_state({t, t + 1e-6}, p).matrix(), pair_state_at(t, p).rho.matrix()), 1e-8);
  }
}

TEST(TimeAverage, InvalidWindowThrows) {
  EXPECT_THROW(time_averaged_pair_state({10.0, 5.0}, clean()), InputError);
  EXPECT_THROW(time_averaged_pair_state({-1.0, 5.0}, clean()), InputError);
}

TEST(PreparedSingle, Examples) {
  EXPECT_TRUE(prepared_single(PolLabel::H).equals_up_to_phase(basis_state(PolLabel::H)));
  EXPECT_TRUE(prepared_single(PolLabel::D).equals_up_to_phase(basis_state(PolLabel::D)));
  EXPECT_TRUE(prepared_single(PolLabel::H, pauli::sigma1()).equals_up_to_phase(basis_state(PolLabel::V)));
  EXPECT_THROW(prepared_single(PolLabel::H, Matrix2c{{1, 1}, {0, 1}}), InputError);
}

TEST(FssModeOverlap, UnityWithoutSplittingAndDecreasing) {
  EXPECT_DOUBLE_EQ(fss_mode_overlap(clean()), 1.0);
  double prev = 1.0;
  for (double d : {0.5, 1.0, 2.1, 5.0, 10.0}) {
    const double m = fss_mode_overlap(clean(d));
    EXPECT_LT(m, prev);
    prev = m;
  }
}
