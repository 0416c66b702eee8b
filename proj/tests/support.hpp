#pragma once

#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "qdtele/polmath.hpp"

namespace qdtele::testing {

inline PolState random_pure(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector2c v(Complex(n(rng), n(rng)), Complex(n(rng), n(rng)));
  return PolState::normalized(v);
}

template <int Dim>
Eigen::Matrix<Complex, Dim, Dim> random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Matrix<Complex, Dim, Dim> g;
  for (int r = 0; r < Dim; ++r)
    for (int c = 0; c < Dim; ++c) g(r, c) = Complex(n(rng), n(rng));
  Eigen::Matrix<Complex, Dim, Dim> m = g * g.adjoint();
  return m / m.trace().real();
}

inline Matrix2c random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix2c g;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) g(r, c) = Complex(n(rng), n(rng));
  Eigen::HouseholderQR<Matrix2c> qr(g);
  return qr.householderQ();
}

template <typename M>
::testing::AssertionResult is_physical(const M& m, double tol = 1e-10) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return ::testing::AssertionFailure() << "not Hermitian";
  if (std::abs(m.trace().real() - 1.0) > tol) return ::testing::AssertionFailure() << "trace " << m.trace().real();
  Eigen::SelfAdjointEigenSolver<M> es(m);
  if (es.eigenvalues().minCoeff() < -tol)
    return ::testing::AssertionFailure() << "negative eigenvalue " << es.eigenvalues().minCoeff();
  return ::testing::AssertionSuccess();
}

template <typename A, typename B>
double max_abs_diff(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qdtele::testing
