#pragma once

// Single-qubit polarization tomography of photon 3: simulated projective
// counts, linear-inversion reconstruction with physical projection, and
// parametric Poisson bootstrap for fidelity uncertainties.
//
// Random draws use a counter-based contract: the engine for (seed, stream) is
// seeded from a SplitMix64 hash of both, so a given run index reproduces the
// same draws no matter which worker evaluates it or in what order.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qdtele/errors.hpp"
#include "qdtele/parallel.hpp"
#include "qdtele/polmath.hpp"

namespace qdtele {

struct TomographyCounts {
  std::array<std::uint64_t, 6> counts{};  // indexed by PolLabel

  std::uint64_t& operator[](PolLabel l) { return counts[static_cast<std::size_t>(l)]; }
  std::uint64_t operator[](PolLabel l) const { return counts[static_cast<std::size_t>(l)]; }

  TomographyCounts scaled(std::uint64_t factor) const {
    TomographyCounts out = *this;
    for (auto& c : out.counts) c *= factor;
    return out;
  }

  bool operator==(const TomographyCounts&) const = default;
};

inline constexpr std::array<std::array<PolLabel, 2>, 3> kTomographyBases = {
    {{PolLabel::H, PolLabel::V}, {PolLabel::D, PolLabel::A}, {PolLabel::R, PolLabel::L}}};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull)));
}

inline std::uint64_t poisson_draw(std::mt19937_64& eng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(eng);
}

}  // namespace detail

inline TomographyCounts simulate_counts(const DensityMatrix2& rho, std::uint64_t shots_per_basis, std::uint64_t seed) {
  if (shots_per_basis == 0) throw InputError("simulate_counts: shots_per_basis must be > 0");
  if (auto why = physicality_violation(rho.matrix())) throw InputError("simulate_counts: density matrix " + *why);
  TomographyCounts out;
  auto eng = detail::stream_engine(seed, 0);
  for (const auto& basis : kTomographyBases)
    for (PolLabel l : basis) out[l] = detail::poisson_draw(eng, double(shots_per_basis) * fidelity(rho, basis_state(l)));
  return out;
}

// Stokes estimates in the (H/V, D/A, R/L) bases, then projection onto physical states.
inline DensityMatrix2 reconstruct(const TomographyCounts& c) {
  std::array<double, 3> s{};
  for (std::size_t b = 0; b < kTomographyBases.size(); ++b) {
    const double plus = double(c[kTomographyBases[b][0]]);
    const double minus = double(c[kTomographyBases[b][1]]);
    if (plus + minus <= 0.0)
      throw ReconstructionError("reconstruct: no counts in the " + std::string(to_string(kTomographyBases[b][0])) + "/" +
                                std::string(to_string(kTomographyBases[b][1])) + " basis");
    s[b] = (plus - minus) / (plus + minus);
  }
  // H/V ↔ σz, D/A ↔ σx, R/L ↔ σy for R = (H + iV)/√2.
  const Matrix2c raw = 0.5 * (Matrix2c::Identity() + s[0] * pauli::sigma3() + s[1] * pauli::sigma1() + s[2] * pauli::sigma2());
  return nearest_physical(raw);
}

// Standard deviation of the fidelity to each target over Poisson resamples of the counts.
// Resamples that leave a basis empty are skipped.
inline std::vector<double> monte_carlo_errors(const TomographyCounts& counts, const std::vector<PolState>& targets,
                                              std::size_t runs = 10000, std::uint64_t seed = 0, unsigned workers = 1) {
  if (runs < 2) throw InputError("monte_carlo_errors: runs must be >= 2");
  (void)reconstruct(counts);
  const std::size_t nt = targets.size();
  std::vector<double> fid(runs * nt, 0.0);
  std::vector<char> ok(runs, 0);
  detail::parallel_for(
      runs,
      [&](std::size_t r) {
        auto eng = detail::stream_engine(seed, r + 1);
        TomographyCounts re;
        for (std::size_t i = 0; i < 6; ++i) re.counts[i] = detail::poisson_draw(eng, double(counts.counts[i]));
        try {
          const DensityMatrix2 rho = reconstruct(re);
          for (std::size_t t = 0; t < nt; ++t) fid[r * nt + t] = fidelity(rho, targets[t]);
          ok[r] = 1;
        } catch (const ReconstructionError&) {
        }
      },
      workers);

  std::vector<double> sd(nt, 0.0);
  std::size_t n = 0;
  for (char o : ok) n += o;
  if (n < 2) throw ReconstructionError("monte_carlo_errors: fewer than two usable resamples");
  for (std::size_t t = 0; t < nt; ++t) {
    double mean = 0.0;
    for (std::size_t r = 0; r < runs; ++r)
      if (ok[r]) mean += fid[r * nt + t];
    mean /= double(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < runs; ++r)
      if (ok[r]) ss += (fid[r * nt + t] - mean) * (fid[r * nt + t] - mean);
    sd[t] = std::sqrt(ss / double(n - 1));
  }
  return sd;
}

}  // namespace qdtele
