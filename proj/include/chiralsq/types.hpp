#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace chiralsq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
// Max-abs deviation from H = H^dag accepted at load time.
inline constexpr double hermitian = 1e-12;
// Symmetry-matrix validity checks (symmetric, unitary, drain-fixing).
inline constexpr double symmetry = 1e-10;
// Constraint-system feasibility and relative nullspace rank cutoff.
inline constexpr double constraint = 1e-10;
// Dark-mode metrics below this mark the system non-relaxing.
inline constexpr double relaxing = 1e-8;
}  // namespace tol

struct dimension_mismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double max_abs(const Matrix &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Site geometry underlying the matrices: integer coordinates (1D or 2D),
/// a drain site index, and an undirected edge list.
struct LatticeSpec {
  std::vector<std::vector<int>> sites;
  int drain = 0;
  std::vector<std::pair<int, int>> edges;

  int size() const { return static_cast<int>(sites.size()); }
  int dim() const { return sites.empty() ? 0 : static_cast<int>(sites.front().size()); }

  void validate() const {
    if (sites.empty()) throw validation_error("lattice: needs at least one site");
    const std::size_t d = sites.front().size();
    if (d < 1 || d > 2) throw validation_error("lattice: coordinates must be 1D or 2D");
    for (const auto &s : sites)
      if (s.size() != d) throw validation_error("lattice: mixed coordinate dimensions");
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j)
        if (sites[i] == sites[j]) throw validation_error("lattice: duplicate site coordinates");
    if (drain < 0 || drain >= size()) throw validation_error("lattice: drain index out of range");
    for (const auto &[a, b] : edges)
      if (a < 0 || b < 0 || a >= size() || b >= size() || a == b)
        throw validation_error("lattice: edge references invalid site");
  }
};

/// Dense Hermitian matrix of couplings, in units of a reference hopping J.
struct Hamiltonian {
  Matrix mat;

  int dim() const { return static_cast<int>(mat.rows()); }
};

/// Checks Hermiticity within `tolerance` and returns the exactly
/// symmetrized matrix; rejects anything further away so that bad input is
/// never silently repaired.
inline Hamiltonian make_hamiltonian(const Matrix &m, double tolerance = tol::hermitian) {
  if (m.rows() != m.cols()) throw dimension_mismatch("hamiltonian: matrix not square");
  const double dev = max_abs(m - m.adjoint());
  if (dev > tolerance)
    throw validation_error("hamiltonian: not Hermitian (max |H - H^dag| = " +
                           std::to_string(dev) + ")");
  return Hamiltonian{(m + m.adjoint().eval()) / 2.0};
}

/// Candidate generalized chiral symmetry. No validity is enforced at
/// construction; see is_valid_symmetry().
struct SymmetryMatrix {
  Matrix mat;
  int drain = 0;

  int dim() const { return static_cast<int>(mat.rows()); }
};

/// Drain squeezing parameters: strength r, angle phi, coupling rate gamma.
struct SqueezeParams {
  double r = 0.0;
  double phi = 0.0;
  double gamma = 1.0;

  void validate() const {
    if (!(r >= 0.0)) throw validation_error("squeeze: r must be >= 0");
    if (!(gamma > 0.0)) throw validation_error("squeeze: gamma must be > 0");
  }
};

/// Second moments of a zero-mean bosonic Gaussian state.
/// normal(m,n) = <a_n^dag a_m>, anomalous(m,n) = <a_m a_n>.
struct GaussianMoments {
  Matrix normal;
  Matrix anomalous;

  int dim() const { return static_cast<int>(normal.rows()); }

  // normal must be Hermitian PSD, anomalous symmetric.
  void validate(double tolerance = 1e-10) const {
    if (normal.rows() != normal.cols() || anomalous.rows() != anomalous.cols() ||
        normal.rows() != anomalous.rows())
      throw dimension_mismatch("moments: normal/anomalous shape mismatch");
    if (max_abs(normal - normal.adjoint()) > tolerance)
      throw validation_error("moments: normal matrix not Hermitian");
    if (max_abs(anomalous - anomalous.transpose()) > tolerance)
      throw validation_error("moments: anomalous matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es((normal + normal.adjoint().eval()) / 2.0);
    if (es.eigenvalues().minCoeff() < -tolerance)
      throw validation_error("moments: normal matrix not positive semidefinite");
  }
};

inline GaussianMoments vacuum_moments(int n) {
  return GaussianMoments{Matrix::Zero(n, n), Matrix::Zero(n, n)};
}

}  // namespace chiralsq
