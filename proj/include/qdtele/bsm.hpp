#pragma once

// Bell-state measurement on photons 1 and 2.

#include <array>
#include <cmath>
#include <optional>

#include "qdtele/errors.hpp"
#include "qdtele/polmath.hpp"

namespace qdtele {

struct BellTerm {
  BellOutcome outcome;
  double probability;
  PolState conditional;  // state left on photon 3
};

// Decomposes |ξ⟩₁ ⊗ |Φ⁺⟩₂₃ in the Bell basis of photons 1 and 2.
inline std::array<BellTerm, 4> bell_decomposition(const PolState& xi) {
  if (std::abs(xi.amplitudes().norm() - 1.0) > tol::kAlgebra) throw InputError("bell_decomposition: state not normalized");
  const Vector4c phi_plus = bell_state(BellOutcome::PhiPlus);
  // |Ψ⟩ indexed as (photon1, photon2, photon3) with photon 3 fastest.
  Eigen::Matrix<Complex, 8, 1> total;
  for (int a = 0; a < 2; ++a)
    for (int bc = 0; bc < 4; ++bc) total(4 * a + bc) = xi.amplitudes()(a) * phi_plus(bc);

  std::array<BellTerm, 4> out{
      BellTerm{BellOutcome::PhiPlus, 0.0, xi}, BellTerm{BellOutcome::PhiMinus, 0.0, xi},
      BellTerm{BellOutcome::PsiPlus, 0.0, xi}, BellTerm{BellOutcome::PsiMinus, 0.0, xi}};
  for (auto& term : out) {
    const Vector4c bell = bell_state(term.outcome);
    Vector2c cond = Vector2c::Zero();
    for (int ab = 0; ab < 4; ++ab)
      for (int c = 0; c < 2; ++c) cond(c) += std::conj(bell(ab)) * total(2 * ab + c);
    term.probability = cond.squaredNorm();
    term.conditional = PolState::normalized(cond);
  }
  return out;
}

struct BsmProjector {
  BellOutcome outcome;
  double visibility;
  Matrix4c effective_operator;
};

// Π = V|Ψ∓⟩⟨Ψ∓| + (1−V)/2 (|HV⟩⟨HV| + |VH⟩⟨VH|) for photons with TPI visibility V.
inline BsmProjector effective_projector(BellOutcome outcome, double visibility) {
  if (outcome != BellOutcome::PsiPlus && outcome != BellOutcome::PsiMinus)
    throw InputError("effective_projector: the linear-optics BSM only heralds PsiPlus and PsiMinus");
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw InputError("effective_projector: visibility must lie in [0, 1]");
  const Vector4c psi = bell_state(outcome);
  Matrix4c classical = Matrix4c::Zero();
  classical(1, 1) = classical(2, 2) = 1.0;
  return {outcome, visibility, visibility * psi * psi.adjoint() + 0.5 * (1.0 - visibility) * classical};
}

enum class BsmPort { A, B };

struct DetectorClick {
  BsmPort port;
  PolLabel polarization;  // H or V, set by the PBS in each arm

  bool operator==(const DetectorClick&) const = default;
};

// Linear-optics truth table for a beamsplitter followed by a PBS in each arm.
// Returns nullopt when the pattern cannot distinguish Φ⁺ from Φ⁻.
inline std::optional<BellOutcome> detection_pattern_to_outcome(const DetectorClick& first, const DetectorClick& second) {
  auto hv = [](PolLabel p) { return p == PolLabel::H || p == PolLabel::V; };
  if (!hv(first.polarization) || !hv(second.polarization))
    throw InputError("detection_pattern_to_outcome: BSM detectors resolve only H and V");
  if (first == second) throw InputError("detection_pattern_to_outcome: the same detector cannot click twice");
  if (first.polarization == second.polarization) return std::nullopt;
  return first.port == second.port ? BellOutcome::PsiPlus : BellOutcome::PsiMinus;
}

}  // namespace qdtele
