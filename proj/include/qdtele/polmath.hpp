#pragma once

// Dense one- and two-qubit polarization algebra in the (H, V) basis.
//
// Conventions used throughout the library:
//   D = (H + V)/√2, A = (H − V)/√2, R = (H + iV)/√2, L = (H − iV)/√2
//   σ1 = σx, σ3 = σz; global phases are dropped.
//   Two-photon basis ordering is (HH, HV, VH, VV), first factor = first photon.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include "qdtele/errors.hpp"

namespace qdtele {

using Complex = std::complex<double>;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

namespace tol {
inline constexpr double kAlgebra = 1e-12;
inline constexpr double kPositivity = 1e-10;
}  // namespace tol

enum class PolLabel { H, V, D, A, R, L };

inline constexpr std::array<PolLabel, 6> kAllPolLabels = {PolLabel::H, PolLabel::V, PolLabel::D,
                                                          PolLabel::A, PolLabel::R, PolLabel::L};

inline std::string_view to_string(PolLabel l) {
  switch (l) {
    case PolLabel::H: return "H";
    case PolLabel::V: return "V";
    case PolLabel::D: return "D";
    case PolLabel::A: return "A";
    case PolLabel::R: return "R";
    case PolLabel::L: return "L";
  }
  return "?";
}

inline PolLabel parse_pol_label(std::string_view s) {
  for (auto l : kAllPolLabels)
    if (to_string(l) == s) return l;
  throw InputError("unknown polarization label '" + std::string(s) + "'");
}

// Orthogonal partner within the same measurement basis.
inline PolLabel partner(PolLabel l) {
  switch (l) {
    case PolLabel::H: return PolLabel::V;
    case PolLabel::V: return PolLabel::H;
    case PolLabel::D: return PolLabel::A;
    case PolLabel::A: return PolLabel::D;
    case PolLabel::R: return PolLabel::L;
    case PolLabel::L: return PolLabel::R;
  }
  return l;
}

enum class BellOutcome { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<BellOutcome, 4> kAllBellOutcomes = {
    BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus, BellOutcome::PsiMinus};

inline std::string_view to_string(BellOutcome o) {
  switch (o) {
    case BellOutcome::PhiPlus: return "PhiPlus";
    case BellOutcome::PhiMinus: return "PhiMinus";
    case BellOutcome::PsiPlus: return "PsiPlus";
    case BellOutcome::PsiMinus: return "PsiMinus";
  }
  return "?";
}

inline BellOutcome parse_bell_outcome(std::string_view s) {
  for (auto o : kAllBellOutcomes)
    if (to_string(o) == s) return o;
  throw InputError("unknown Bell outcome '" + std::string(s) + "'");
}

// Normalized single-photon polarization state. Equality ignores global phase.
class PolState {
 public:
  static PolState from_amplitudes(Complex h, Complex v) {
    Vector2c a(h, v);
    if (std::abs(a.norm() - 1.0) > tol::kAlgebra)
      throw InputError("polarization state is not normalized (norm " + std::to_string(a.norm()) + ")");
    return PolState(a);
  }

  // Normalizes the input; a zero vector is rejected.
  static PolState normalized(const Vector2c& a) {
    const double n = a.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InputError("cannot normalize a zero polarization vector");
    return PolState(a / n);
  }

  const Vector2c& amplitudes() const { return amp_; }
  Complex h() const { return amp_(0); }
  Complex v() const { return amp_(1); }

  Complex inner(const PolState& other) const { return amp_.dot(other.amp_); }

  bool equals_up_to_phase(const PolState& other, double eps = tol::kAlgebra) const {
    return std::abs(1.0 - std::abs(inner(other))) <= eps;
  }

 private:
  explicit PolState(Vector2c a) : amp_(std::move(a)) {}
  Vector2c amp_;
};

inline PolState basis_state(PolLabel label) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  switch (label) {
    case PolLabel::H: return PolState::from_amplitudes(1.0, 0.0);
    case PolLabel::V: return PolState::from_amplitudes(0.0, 1.0);
    case PolLabel::D: return PolState::from_amplitudes(s, s);
    case PolLabel::A: return PolState::from_amplitudes(s, -s);
    case PolLabel::R: return PolState::from_amplitudes(s, i * s);
    case PolLabel::L: return PolState::from_amplitudes(s, -i * s);
  }
  throw InputError("unknown polarization label");
}

inline PolState basis_state(std::string_view label) { return basis_state(parse_pol_label(label)); }

// Returns a description of the first violated invariant, or nullopt for a physical state.
template <typename Derived>
std::optional<std::string> physicality_violation(const Eigen::MatrixBase<Derived>& m,
                                                 double herm_eps = tol::kAlgebra,
                                                 double pos_eps = tol::kPositivity) {
  if (m.rows() != m.cols()) return "matrix is not square";
  if (!m.allFinite()) return "matrix has non-finite entries";
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_eps) return "not Hermitian (max deviation " + std::to_string(herm) + ")";
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > herm_eps)
    return "trace is not 1 (" + std::to_string(tr.real()) + ")";
  using Mat = Eigen::Matrix<Complex, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>;
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -pos_eps) return "negative eigenvalue " + std::to_string(lo);
  return std::nullopt;
}

// Physical density operator of fixed dimension (2 or 4).
template <int Dim>
class DensityMatrix {
  static_assert(Dim == 2 || Dim == 4, "only one- and two-photon polarization states are supported");

 public:
  using Matrix = Eigen::Matrix<Complex, Dim, Dim>;

  // Validates Hermiticity, unit trace and positivity.
  static DensityMatrix from_matrix(const Matrix& m) {
    if (auto why = physicality_violation(m)) throw InputError("density matrix " + *why);
    return DensityMatrix(m);
  }

  static DensityMatrix maximally_mixed() { return DensityMatrix(Matrix::Identity() / double(Dim)); }

  static constexpr int dim() { return Dim; }
  const Matrix& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  double purity() const { return (m_ * m_).trace().real(); }

 private:
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

using DensityMatrix2 = DensityMatrix<2>;
using DensityMatrix4 = DensityMatrix<4>;

inline DensityMatrix2 density_from_pure(const PolState& psi) {
  const Vector2c& a = psi.amplitudes();
  if (std::abs(a.norm() - 1.0) > tol::kAlgebra) throw InputError("density_from_pure: state not normalized");
  return DensityMatrix2::from_matrix(a * a.adjoint());
}

inline DensityMatrix4 density_from_pure(const Vector4c& psi) {
  if (std::abs(psi.norm() - 1.0) > tol::kAlgebra) throw InputError("density_from_pure: state not normalized");
  return DensityMatrix4::from_matrix(psi * psi.adjoint());
}

// ⟨target|ρ|target⟩
inline double fidelity(const DensityMatrix2& rho, const PolState& target) {
  const Vector2c& t = target.amplitudes();
  const Complex f = t.dot(rho.matrix() * t);
  return std::clamp(f.real(), 0.0, 1.0);
}

// Overload for dynamically sized input, e.g. matrices read from a report.
inline double fidelity(const Eigen::MatrixXcd& rho, const PolState& target) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw InputError("fidelity: expected a 2x2 density matrix, got " + std::to_string(rho.rows()) + "x" +
                     std::to_string(rho.cols()));
  return fidelity(DensityMatrix2::from_matrix(Matrix2c(rho)), target);
}

namespace pauli {
inline Matrix2c identity() { return Matrix2c::Identity(); }
inline Matrix2c sigma1() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix2c sigma2() {
  Matrix2c m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline Matrix2c sigma3() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

inline Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline Vector4c kron(const Vector2c& a, const Vector2c& b) {
  Vector4c out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

inline Vector4c bell_state(BellOutcome o) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector4c v = Vector4c::Zero();
  switch (o) {
    case BellOutcome::PhiPlus: v << s, 0, 0, s; break;
    case BellOutcome::PhiMinus: v << s, 0, 0, -s; break;
    case BellOutcome::PsiPlus: v << 0, s, s, 0; break;
    case BellOutcome::PsiMinus: v << 0, s, -s, 0; break;
  }
  return v;
}

// Operator that the heralded outcome leaves on the receiving photon: I, σ3, σ1, σ1σ3.
inline Matrix2c heralded_operator(BellOutcome o) {
  switch (o) {
    case BellOutcome::PhiPlus: return pauli::identity();
    case BellOutcome::PhiMinus: return pauli::sigma3();
    case BellOutcome::PsiPlus: return pauli::sigma1();
    case BellOutcome::PsiMinus: return pauli::sigma1() * pauli::sigma3();
  }
  return pauli::identity();
}

// Unitary that undoes heralded_operator(o) up to a global phase.
inline Matrix2c correction_unitary(BellOutcome o) { return heralded_operator(o).adjoint(); }

inline DensityMatrix2 pauli_correction(const DensityMatrix2& rho, BellOutcome outcome) {
  const Matrix2c u = correction_unitary(outcome);
  return DensityMatrix2::from_matrix(u * rho.matrix() * u.adjoint());
}

// Wootters concurrence from the eigenvalues of ρ(σy⊗σy)ρ*(σy⊗σy).
inline double concurrence(const DensityMatrix4& rho) {
  const Matrix4c yy = kron(pauli::sigma2(), pauli::sigma2());
  const Matrix4c r = rho.matrix() * yy * rho.matrix().conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix4c> es(r, false);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
}

// Checked wrapper for matrices from outside the library.
inline double concurrence(const Matrix4c& m) {
  if (auto why = physicality_violation(m)) throw InputError("concurrence: density matrix " + *why);
  return concurrence(DensityMatrix4::from_matrix(m));
}

// Clips negative eigenvalues of a Hermitian 2x2 matrix and renormalizes the trace.
inline DensityMatrix2 nearest_physical(const Matrix2c& raw) {
  if (!raw.allFinite()) throw InputError("nearest_physical: non-finite entries");
  if ((raw - raw.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw InputError("nearest_physical: input not Hermitian");
  const Matrix2c h = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(h);
  Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
  const double total = ev.sum();
  if (!(total > 0.0)) throw InputError("nearest_physical: no positive spectral weight");
  ev /= total;
  Matrix2c out = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix2::from_matrix(out);
}

// Tr over the first qubit of a two-qubit operator in (HH, HV, VH, VV) ordering.
inline Matrix2c trace_first(const Matrix4c& m) {
  return m.block<2, 2>(0, 0) + m.block<2, 2>(2, 2);
}

inline Matrix2c trace_second(const Matrix4c& m) {
  Matrix2c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
  return out;
}

}  // namespace qdtele
