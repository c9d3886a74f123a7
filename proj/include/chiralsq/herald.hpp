#pragma once

// Heralding lattice: a drain site between a nearest-neighbor chain A
// (labels 1..L) and a set of disconnected sites B (labels -L..-1). The
// target correlations pair each B site with one energy eigenmode of A, so
// the symmetry cross-block is the discrete sine transform.
//
// Matrix index i maps to site label i - L, so B occupies indices 0..L-1,
// the drain sits at index L, and A occupies indices L+1..2L.

#include <cmath>
#include <numbers>

#include "chiralsq/types.hpp"

namespace chiralsq {

inline int herald_index(int L, int label) { return label + L; }

inline SymmetryMatrix herald_sigma(int L) {
  if (L < 1) throw validation_error("herald_sigma: L must be >= 1");
  const int n = 2 * L + 1;
  const double norm = std::sqrt(2.0 / (L + 1));
  Matrix s = Matrix::Zero(n, n);
  s(herald_index(L, 0), herald_index(L, 0)) = 1.0;
  for (int m = -L; m <= L; ++m)
    for (int k = -L; k <= L; ++k)
      if ((m > 0 && k < 0) || (m < 0 && k > 0))
        s(herald_index(L, m), herald_index(L, k)) =
            norm * std::sin(std::numbers::pi * m * k / (L + 1));
  return SymmetryMatrix{std::move(s), herald_index(L, 0)};
}

struct HeraldParams {
  int L = 4;
  double V = 2.5;         // A-chain on-site potential, units of J
  double hopping = 1.0;   // A-chain nearest-neighbor strength J
  std::vector<cplx> drain_to_B;  // H(0, -m) for m = 1..L; defaults to -J each
};

/// Builds the full (2L+1)-site Hamiltonian: chain A per the template, B-site
/// potentials matched to the A eigenmode energies, A and B decoupled, drain
/// couplings to A generated from the given couplings to B via the sine
/// transform. The symmetry residual vanishes by construction and is invariant
/// under uniform real rescaling of the whole drain row.
inline Hamiltonian herald_hamiltonian(const HeraldParams &p) {
  if (p.L < 1) throw validation_error("herald_hamiltonian: L must be >= 1");
  if (!(p.hopping > 0)) throw validation_error("herald_hamiltonian: hopping must be > 0");
  if (!p.drain_to_B.empty() && static_cast<int>(p.drain_to_B.size()) != p.L)
    throw dimension_mismatch("herald_hamiltonian: need L drain couplings");
  const int L = p.L, n = 2 * L + 1, drain = herald_index(L, 0);
  const double M = L + 1;
  std::vector<cplx> cB = p.drain_to_B;
  if (cB.empty()) cB.assign(L, cplx{-p.hopping, 0.0});

  Matrix h = Matrix::Zero(n, n);
  for (int m = 1; m <= L; ++m) {
    h(herald_index(L, m), herald_index(L, m)) = p.V;
    h(herald_index(L, -m), herald_index(L, -m)) =
        2.0 * p.hopping * std::cos(std::numbers::pi * m / M) - p.V;
    if (m < L) {
      h(herald_index(L, m), herald_index(L, m + 1)) = -p.hopping;
      h(herald_index(L, m + 1), herald_index(L, m)) = -p.hopping;
    }
  }
  for (int m = 1; m <= L; ++m) {
    h(drain, herald_index(L, -m)) = cB[m - 1];
    h(herald_index(L, -m), drain) = std::conj(cB[m - 1]);
  }
  const double norm = std::sqrt(2.0 / M);
  for (int k = 1; k <= L; ++k) {
    cplx c{0.0, 0.0};
    for (int l = 1; l <= L; ++l)
      c += std::conj(cB[l - 1]) * std::sin(std::numbers::pi * k * l / M);
    c *= norm;
    h(drain, herald_index(L, k)) = c;
    h(herald_index(L, k), drain) = std::conj(c);
  }
  return Hamiltonian{std::move(h)};
}

inline LatticeSpec herald_lattice(const HeraldParams &p) {
  const Hamiltonian h = herald_hamiltonian(p);
  LatticeSpec lat;
  for (int label = -p.L; label <= p.L; ++label) lat.sites.push_back({label});
  lat.drain = herald_index(p.L, 0);
  for (int i = 0; i < h.dim(); ++i)
    for (int j = i + 1; j < h.dim(); ++j)
      if (std::abs(h.mat(i, j)) > 0) lat.edges.emplace_back(i, j);
  lat.validate();
  return lat;
}

}  // namespace chiralsq
