#pragma once

// Generalized chiral symmetry: validity checks for the candidate matrix
// sigma (symmetric, unitary, drain-fixing), the residual of the symmetry
// relation sigma^dag H sigma = -H^*, and the squeezed steady-state moments
// the symmetry predicts.

#include <cmath>

#include "chiralsq/types.hpp"

namespace chiralsq {

struct SymmetryReport {
  double symmetric_dev = 0.0;  // max |sigma - sigma^T|
  double unitary_dev = 0.0;    // max |sigma^dag sigma - I|
  double drain_dev = 0.0;      // max_m |sigma(m, n0) - delta(m, n0)|
  bool valid = false;
};

inline SymmetryReport is_valid_symmetry(const SymmetryMatrix &sigma,
                                        double tolerance = tol::symmetry) {
  const auto &s = sigma.mat;
  if (s.rows() != s.cols()) throw dimension_mismatch("symmetry: matrix not square");
  if (sigma.drain < 0 || sigma.drain >= sigma.dim())
    throw dimension_mismatch("symmetry: drain index out of range");
  SymmetryReport rep;
  rep.symmetric_dev = max_abs(s - s.transpose());
  rep.unitary_dev = max_abs(s.adjoint() * s - Matrix::Identity(s.rows(), s.cols()));
  Vector drain_col = s.col(sigma.drain);
  drain_col(sigma.drain) -= 1.0;
  rep.drain_dev = drain_col.cwiseAbs().maxCoeff();
  rep.valid = rep.symmetric_dev <= tolerance && rep.unitary_dev <= tolerance &&
              rep.drain_dev <= tolerance;
  return rep;
}

/// Max-abs entry of sigma^dag H sigma + H^*; zero certifies the symmetry.
inline double chiral_residual(const Hamiltonian &h, const SymmetryMatrix &sigma) {
  if (h.dim() != sigma.dim())
    throw dimension_mismatch("chiral_residual: Hamiltonian and sigma dimensions differ");
  return max_abs(sigma.mat.adjoint() * h.mat * sigma.mat + h.mat.conjugate());
}

/// Steady-state second moments implied by a valid symmetry:
/// uniform thermal-like diagonal sinh^2(r) plus anomalous pairing along sigma.
inline GaussianMoments predicted_steady_moments(const SymmetryMatrix &sigma,
                                                const SqueezeParams &sq) {
  sq.validate();
  const auto rep = is_valid_symmetry(sigma);
  if (!rep.valid)
    throw validation_error("predicted_steady_moments: sigma fails the symmetry conditions");
  const int n = sigma.dim();
  const double sh = std::sinh(sq.r), ch = std::cosh(sq.r);
  GaussianMoments g;
  g.normal = sh * sh * Matrix::Identity(n, n);
  g.anomalous = std::polar(sh * ch, sq.phi) * sigma.mat;
  return g;
}

/// Distance from the pure-state relation M M^dag = N (N + I); zero for any
/// zero-mean pure Gaussian squeezed vacuum.
inline double purity_deviation(const GaussianMoments &g) {
  const int n = g.dim();
  return max_abs(g.anomalous * g.anomalous.adjoint() -
                 g.normal * (g.normal + Matrix::Identity(n, n)));
}

}  // namespace chiralsq
