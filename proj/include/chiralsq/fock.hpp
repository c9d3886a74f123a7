#pragma once

// Brute-force cross-check for the Gaussian moment flow: evolve the full
// density matrix in a photon-number-truncated Fock space under the same
// master equation and read the second moments off rho. Only meant for up
// to three sites; everything is dense-in-rho, sparse-in-operators.

#include <boost/numeric/odeint.hpp>
#include <Eigen/SparseCore>

#include <cmath>
#include <optional>
#include <vector>

#include "chiralsq/types.hpp"

namespace chiralsq {

struct truncation_error : std::runtime_error {
  double leaked;
  truncation_error(const std::string &msg, double l) : std::runtime_error(msg), leaked(l) {}
};

namespace fock_detail {

using Sparse = Eigen::SparseMatrix<cplx>;

inline Sparse kron(const Sparse &a, const Sparse &b) {
  Sparse out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(std::size_t(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (Sparse::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (Sparse::InnerIterator ib(b, kb); ib; ++ib)
          trip.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                            ia.value() * ib.value());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

inline Sparse ladder_down(int cutoff) {
  Sparse a(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a.insert(n - 1, n) = std::sqrt(double(n));
  a.makeCompressed();
  return a;
}

inline Sparse identity(int d) {
  Sparse id(d, d);
  id.setIdentity();
  return id;
}

// tr(rho * op) without forming the product.
inline cplx trace_product(const Eigen::Ref<const Matrix> &rho, const Sparse &op) {
  cplx sum{0, 0};
  for (int k = 0; k < op.outerSize(); ++k)
    for (Sparse::InnerIterator it(op, k); it; ++it) sum += rho(it.col(), it.row()) * it.value();
  return sum;
}

}  // namespace fock_detail

/// Photon-number tail of a single-mode squeezed vacuum beyond the cutoff;
/// the population lost by truncating every site at `cutoff`.
inline double squeezed_tail(double r, int cutoff) {
  const double th2 = std::tanh(r) * std::tanh(r);
  double term = 1.0 / std::cosh(r);  // P(0)
  double kept = 0.0;
  for (int k = 0; 2 * k <= cutoff; ++k) {
    kept += term;
    // P(2k+2) / P(2k) = th^2 (2k+1)(2k+2) / (4 (k+1)^2)
    term *= th2 * (2 * k + 1) * (2 * k + 2) / (4.0 * (k + 1) * (k + 1));
  }
  return std::max(0.0, 1.0 - kept);
}

/// Evolves the truncated density matrix under the squeezed-drain master
/// equation, to time `duration` or (by default) until the flow stalls, and
/// returns the second moments. Validation plumbing only: N <= 3 sites.
inline GaussianMoments fock_oracle(const Hamiltonian &h, int n0, const SqueezeParams &sq,
                                   int cutoff, std::optional<double> duration = std::nullopt) {
  namespace ode = boost::numeric::odeint;
  using fock_detail::Sparse;
  sq.validate();
  const int sites = h.dim();
  if (sites < 1 || sites > 3)
    throw validation_error("fock_oracle: supports 1 to 3 sites only");
  if (cutoff < 8) throw validation_error("fock_oracle: cutoff must be >= 8");
  if (n0 < 0 || n0 >= sites) throw dimension_mismatch("fock_oracle: drain out of range");
  const double tail = squeezed_tail(sq.r, cutoff);
  if (tail > 1e-6)
    throw truncation_error("fock_oracle: squeezing too strong for the cutoff (estimated "
                           "truncated population " + std::to_string(tail) + ")",
                           tail);

  const int per = cutoff + 1;
  int dim = 1;
  for (int s = 0; s < sites; ++s) dim *= per;

  // Per-site annihilation operators in the product basis.
  std::vector<Sparse> a(sites);
  for (int s = 0; s < sites; ++s) {
    Sparse op = fock_detail::identity(1);
    for (int k = 0; k < sites; ++k)
      op = fock_detail::kron(op, k == s ? fock_detail::ladder_down(cutoff)
                                        : fock_detail::identity(per));
    a[s] = op;
  }

  Sparse h_fock(dim, dim);
  for (int m = 0; m < sites; ++m)
    for (int n = 0; n < sites; ++n)
      if (std::abs(h.mat(m, n)) > 0)
        h_fock = h_fock + Sparse(h.mat(m, n) * (a[m].adjoint() * a[n]));
  const double sh = std::sinh(sq.r), ch = std::cosh(sq.r);
  const Sparse jump = Sparse(ch * a[n0] - std::polar(sh, sq.phi) * Sparse(a[n0].adjoint()));
  const Sparse jdag = jump.adjoint();
  const Sparse number = Sparse(jdag * jump);

  using state = std::vector<double>;
  const auto rhs = [&](const state &s, state &dsdt, double) {
    dsdt.resize(s.size());
    Eigen::Map<const Matrix> rho(reinterpret_cast<const cplx *>(s.data()), dim, dim);
    Eigen::Map<Matrix> drho(reinterpret_cast<cplx *>(dsdt.data()), dim, dim);
    drho = cplx{0, 1} * (rho * h_fock - h_fock * rho) +
           sq.gamma * (jump * (rho * jdag) - 0.5 * (number * rho + rho * number));
  };

  state s(std::size_t(2) * dim * dim, 0.0);
  s[0] = 1.0;  // vacuum projector
  auto stepper = ode::make_controlled(1e-9, 1e-9, ode::runge_kutta_dopri5<state>());

  const auto max_rhs = [&](const state &cur) {
    state d;
    rhs(cur, d, 0.0);
    double m = 0.0;
    for (double v : d) m = std::max(m, std::abs(v));
    return m;
  };

  const double chunk = duration ? *duration : 2.0 / sq.gamma;
  const double t_end = duration ? *duration : 600.0 / sq.gamma;
  double t = 0.0;
  while (t < t_end) {
    const double target = std::min(t + chunk, t_end);
    double dt = 1e-3;
    while (t < target) {
      dt = std::min(dt, target - t);
      if (dt < 1e-13)
        throw std::runtime_error("fock_oracle: step size underflow");
      stepper.try_step(rhs, s, t, dt);
    }
    {  // keep rho exactly Hermitian between chunks
      Eigen::Map<Matrix> rho(reinterpret_cast<cplx *>(s.data()), dim, dim);
      rho = ((rho + rho.adjoint()) / 2.0).eval();
    }
    if (!duration && max_rhs(s) < 1e-9) break;
  }

  Eigen::Map<const Matrix> rho(reinterpret_cast<const cplx *>(s.data()), dim, dim);
  const double trace = rho.trace().real();

  // Population stranded at the truncation edge.
  double leak = 0.0;
  for (int idx = 0; idx < dim; ++idx) {
    int rem = idx;
    bool at_edge = false;
    for (int k = sites - 1; k >= 0; --k) {
      if (rem % per == cutoff) at_edge = true;
      rem /= per;
    }
    if (at_edge) leak += rho(idx, idx).real();
  }
  if (leak / trace > 1e-6)
    throw truncation_error("fock_oracle: truncated population " + std::to_string(leak / trace) +
                               " exceeds 1e-6; raise the cutoff or lower r",
                           leak / trace);

  GaussianMoments g = vacuum_moments(sites);
  for (int m = 0; m < sites; ++m)
    for (int n = 0; n < sites; ++n) {
      g.normal(m, n) = fock_detail::trace_product(rho, Sparse(a[n].adjoint() * a[m])) / trace;
      g.anomalous(m, n) = fock_detail::trace_product(rho, Sparse(a[m] * a[n])) / trace;
    }
  return g;
}

}  // namespace chiralsq
