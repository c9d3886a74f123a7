#pragma once

// Eigenmode analysis and dark-mode robustness metrics. A dark mode is an
// eigenmode with no weight on the drain site, or one hidden inside a
// degenerate subspace; either blocks relaxation to the unique steady state.

#include <functional>
#include <limits>
#include <span>

#include "chiralsq/chiral.hpp"
#include "chiralsq/types.hpp"

namespace chiralsq {

struct ModeSet {
  Eigen::VectorXd energies;  // ascending
  Matrix wavefunctions;      // column i is the mode at energies(i)
};

/// Full spectral decomposition with a deterministic phase convention:
/// each column is rotated so its largest-magnitude entry is real positive.
inline ModeSet eigenmodes(const Hamiltonian &h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenmodes: solver failed");
  ModeSet modes{es.eigenvalues(), es.eigenvectors()};
  for (int i = 0; i < modes.wavefunctions.cols(); ++i) {
    int peak = 0;
    modes.wavefunctions.col(i).cwiseAbs().maxCoeff(&peak);
    const cplx z = modes.wavefunctions(peak, i);
    if (std::abs(z) > 0) modes.wavefunctions.col(i) *= std::conj(z) / std::abs(z);
  }
  return modes;
}

struct DarkModeMetrics {
  double min_drain_weight = 0.0;  // min_i |psi_i(n0)|
  double min_gap = 0.0;           // min_{i<j} |eps_i - eps_j|
  bool relaxing = false;
};

inline DarkModeMetrics dark_mode_metrics(const Hamiltonian &h, int n0,
                                         double threshold = tol::relaxing) {
  if (n0 < 0 || n0 >= h.dim()) throw dimension_mismatch("dark_mode_metrics: drain out of range");
  const ModeSet modes = eigenmodes(h);
  DarkModeMetrics m;
  m.min_drain_weight = modes.wavefunctions.row(n0).cwiseAbs().minCoeff();
  m.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < modes.energies.size(); ++i)
    m.min_gap = std::min(m.min_gap, modes.energies(i + 1) - modes.energies(i));
  if (h.dim() == 1) m.min_gap = std::numeric_limits<double>::infinity();
  m.relaxing = m.min_drain_weight > threshold && m.min_gap > threshold;
  return m;
}

struct ScanRow {
  double param = 0.0;
  double min_drain_weight = 0.0;
  double min_gap = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double argmax_weight = 0.0;   // parameter maximizing min_drain_weight
  double argmax_gap = 0.0;      // parameter maximizing min_gap
  double argmax_product = 0.0;  // parameter maximizing their product
};

struct scan_error : std::runtime_error {
  double param;
  scan_error(const std::string &msg, double p) : std::runtime_error(msg), param(p) {}
};

/// Sweeps a one-parameter Hamiltonian family and tabulates both dark-mode
/// metrics. Every generated Hamiltonian must stay inside the symmetry class
/// of `sigma` (residual <= constraint tolerance); a stray parameter aborts
/// the scan.
inline ScanResult scan(const std::function<Hamiltonian(double)> &family,
                       std::span<const double> grid, int n0, const SymmetryMatrix &sigma) {
  ScanResult result;
  double best_w = -1.0, best_g = -1.0, best_p = -1.0;
  for (double v : grid) {
    const Hamiltonian h = family(v);
    if (chiral_residual(h, sigma) > tol::constraint)
      throw scan_error("scan: family left the chiral symmetry class at parameter " +
                           std::to_string(v),
                       v);
    const DarkModeMetrics m = dark_mode_metrics(h, n0);
    result.rows.push_back({v, m.min_drain_weight, m.min_gap});
    if (m.min_drain_weight > best_w) {
      best_w = m.min_drain_weight;
      result.argmax_weight = v;
    }
    if (m.min_gap > best_g) {
      best_g = m.min_gap;
      result.argmax_gap = v;
    }
    const double prod = m.min_drain_weight * m.min_gap;
    if (prod > best_p) {
      best_p = prod;
      result.argmax_product = v;
    }
  }
  return result;
}

inline std::vector<double> linear_grid(double from, double to, double step) {
  if (!(step > 0)) throw validation_error("grid: step must be > 0");
  std::vector<double> g;
  for (int i = 0;; ++i) {
    const double v = from + i * step;
    if (v > to + step * 1e-9) break;
    g.push_back(v);
  }
  return g;
}

}  // namespace chiralsq
