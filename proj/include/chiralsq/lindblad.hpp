#pragma once

// Second-moment flow of the lattice coupled to the squeezed drain. The
// master equation closes on the pair (N, M):
//
//   dN/dt = -(W N + N W^dag) + Gamma sinh^2(r) P
//   dM/dt = -(W M + M W^T)   + Gamma e^{i phi} sinh(r) cosh(r) P
//
// with W = iH + (Gamma/2) P and P the projector on the drain site. First
// moments decay to zero independently and are not tracked. Steady states
// come from a direct Sylvester solve; evolve() integrates the flow with an
// adaptive Dormand-Prince stepper.

#include <boost/numeric/odeint.hpp>

#include "chiralsq/spectral.hpp"
#include "chiralsq/sylvester.hpp"
#include "chiralsq/types.hpp"

namespace chiralsq {

struct non_relaxing_error : std::runtime_error {
  double min_decay;
  non_relaxing_error(const std::string &msg, double d) : std::runtime_error(msg), min_decay(d) {}
};

struct stiffness_error : std::runtime_error {
  double t_reached, step_size;
  stiffness_error(const std::string &msg, double t, double dt)
      : std::runtime_error(msg), t_reached(t), step_size(dt) {}
};

struct MomentGenerator {
  Matrix drift;       // W = iH + (Gamma/2) P
  Matrix pump_normal; // Gamma sinh^2(r) P
  Matrix pump_anom;   // Gamma e^{i phi} sinh(r) cosh(r) P
  Hamiltonian hamiltonian;
  int n0 = 0;
  double gamma = 0.0;

  int dim() const { return static_cast<int>(drift.rows()); }

  void apply(const Matrix &normal, const Matrix &anomalous, Matrix &d_normal,
             Matrix &d_anomalous) const {
    d_normal = -(drift * normal + normal * drift.adjoint()) + pump_normal;
    d_anomalous = -(drift * anomalous + anomalous * drift.transpose()) + pump_anom;
  }

  GaussianMoments apply(const GaussianMoments &g) const {
    GaussianMoments d;
    apply(g.normal, g.anomalous, d.normal, d.anomalous);
    return d;
  }
};

inline MomentGenerator moment_generator(const Hamiltonian &h, int n0, const SqueezeParams &sq) {
  sq.validate();
  if (n0 < 0 || n0 >= h.dim()) throw dimension_mismatch("moment_generator: drain out of range");
  const int n = h.dim();
  const double sh = std::sinh(sq.r), ch = std::cosh(sq.r);
  MomentGenerator gen;
  gen.drift = cplx{0, 1} * h.mat;
  gen.drift(n0, n0) += sq.gamma / 2;
  gen.pump_normal = Matrix::Zero(n, n);
  gen.pump_normal(n0, n0) = sq.gamma * sh * sh;
  gen.pump_anom = Matrix::Zero(n, n);
  gen.pump_anom(n0, n0) = sq.gamma * std::polar(sh * ch, sq.phi);
  gen.hamiltonian = h;
  gen.n0 = n0;
  gen.gamma = sq.gamma;
  return gen;
}

/// Entrywise max-abs distance over both moment matrices.
inline double moment_distance(const GaussianMoments &a, const GaussianMoments &b) {
  if (a.dim() != b.dim()) throw dimension_mismatch("moment_distance: dimension mismatch");
  return std::max(max_abs(a.normal - b.normal), max_abs(a.anomalous - b.anomalous));
}

namespace detail {

// odeint state: both matrices flattened to interleaved re/im doubles.
using ode_state = std::vector<double>;

inline ode_state pack(const GaussianMoments &g) {
  const int n = g.dim();
  ode_state s(4 * n * n);
  auto *z = reinterpret_cast<cplx *>(s.data());
  Eigen::Map<Matrix>(z, n, n) = g.normal;
  Eigen::Map<Matrix>(z + n * n, n, n) = g.anomalous;
  return s;
}

inline GaussianMoments unpack(const ode_state &s, int n) {
  const auto *z = reinterpret_cast<const cplx *>(s.data());
  return GaussianMoments{Eigen::Map<const Matrix>(z, n, n),
                         Eigen::Map<const Matrix>(z + n * n, n, n)};
}

}  // namespace detail

/// Integrates the moment flow for duration t (adaptive Dormand-Prince,
/// absolute and relative local error `tolerance`).
inline GaussianMoments evolve(const GaussianMoments &g0, const MomentGenerator &gen, double t,
                              double tolerance = 1e-10) {
  namespace ode = boost::numeric::odeint;
  const int n = gen.dim();
  if (g0.dim() != n) throw dimension_mismatch("evolve: moments/generator dimension mismatch");
  if (t < 0) throw validation_error("evolve: negative duration");
  if (t == 0) return g0;

  const auto rhs = [&](const detail::ode_state &s, detail::ode_state &dsdt, double) {
    const auto *z = reinterpret_cast<const cplx *>(s.data());
    dsdt.resize(s.size());
    auto *dz = reinterpret_cast<cplx *>(dsdt.data());
    Eigen::Map<const Matrix> normal(z, n, n), anomalous(z + n * n, n, n);
    Eigen::Map<Matrix> d_normal(dz, n, n), d_anomalous(dz + n * n, n, n);
    d_normal = -(gen.drift * normal + normal * gen.drift.adjoint()) + gen.pump_normal;
    d_anomalous = -(gen.drift * anomalous + anomalous * gen.drift.transpose()) + gen.pump_anom;
  };

  auto stepper =
      ode::make_controlled(tolerance, tolerance, ode::runge_kutta_dopri5<detail::ode_state>());
  detail::ode_state s = detail::pack(g0);
  double time = 0.0;
  double dt = std::min(t, 0.1 / (1.0 + max_abs(gen.drift)));
  int consecutive_rejects = 0;
  while (time < t) {
    dt = std::min(dt, t - time);
    if (dt < t * 1e-14)
      throw stiffness_error("evolve: step size underflow at t = " + std::to_string(time) +
                                " (dt = " + std::to_string(dt) + "); flow too stiff",
                            time, dt);
    if (stepper.try_step(rhs, s, time, dt) == ode::success) {
      consecutive_rejects = 0;
    } else if (++consecutive_rejects > 1000) {
      throw stiffness_error("evolve: controller rejected 1000 consecutive steps at t = " +
                                std::to_string(time),
                            time, dt);
    }
  }
  return detail::unpack(s, n);
}

/// Steady state of the moment flow by direct Sylvester solve. Requires a
/// relaxing system (no dark modes, no exact degeneracies); a singular or
/// near-singular flow is reported instead of solved.
inline GaussianMoments steady_moments(const MomentGenerator &gen,
                                      double residual_tolerance = 1e-10) {
  const DarkModeMetrics metrics = dark_mode_metrics(gen.hamiltonian, gen.n0);
  if (!metrics.relaxing)
    throw non_relaxing_error(
        "steady_moments: non-relaxing: dark mode or degeneracy suspected "
        "(min drain weight " + std::to_string(metrics.min_drain_weight) +
            ", min gap " + std::to_string(metrics.min_gap) + ")",
        std::min(metrics.min_drain_weight, metrics.min_gap));

  const SylvesterSolver solver(gen.drift);
  const double scale = max_abs(gen.drift);
  const double decay = std::min(solver.min_decay_dag(), solver.min_decay_transpose());
  if (decay <= 1e-12 * std::max(1.0, scale))
    throw non_relaxing_error(
        "steady_moments: non-relaxing: dark mode or degeneracy suspected (smallest "
        "decay rate " + std::to_string(decay) + ")",
        decay);

  GaussianMoments g{solver.solve_dag(gen.pump_normal), solver.solve_transpose(gen.pump_anom)};
  const GaussianMoments residual = gen.apply(g);
  const double res = std::max(max_abs(residual.normal), max_abs(residual.anomalous));
  if (res > residual_tolerance * std::max(1.0, scale))
    throw std::runtime_error("steady_moments: fixed-point residual " + std::to_string(res) +
                             " exceeds tolerance");
  return g;
}

}  // namespace chiralsq
