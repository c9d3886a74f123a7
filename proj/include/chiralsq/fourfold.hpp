#pragma once

// Four-fold entangled square lattice: a (2L+1) x (2L+1) grid with the drain
// at the origin, where each orbit of four sites related by 90-degree
// rotation forms one entangled quadruplet. The symmetry matrix couples
// orbit partners through a fixed 4x4 unitary block with a parity prefactor;
// the Hamiltonian is generated from one quadrant by the rotation rules
// (potentials flip sign, hoppings conjugate and pick up quadrant-dependent
// factors of i) plus a dedicated rule for the four drain couplings.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "chiralsq/types.hpp"

namespace chiralsq {

struct SquareGrid {
  int L = 2;

  int side() const { return 2 * L + 1; }
  int size() const { return side() * side(); }
  bool contains(int x, int y) const { return std::abs(x) <= L && std::abs(y) <= L; }
  int index(int x, int y) const {
    if (!contains(x, y)) throw dimension_mismatch("grid: coordinate out of range");
    return (x + L) + side() * (y + L);
  }
  std::array<int, 2> coord(int idx) const { return {idx % side() - L, idx / side() - L}; }
  int drain_index() const { return index(0, 0); }
};

inline SquareGrid grid_for_dim(int n) {
  const int side = static_cast<int>(std::lround(std::sqrt(double(n))));
  if (side * side != n || side % 2 == 0)
    throw dimension_mismatch("grid: dimension is not an odd square");
  return SquareGrid{(side - 1) / 2};
}

inline std::array<int, 2> rotate90(int x, int y) { return {-y, x}; }

/// Half-open quadrant label in {1,2,3,4}; 0 for the origin. Each rotation
/// orbit of a nonzero site visits each quadrant exactly once.
inline int quadrant(int x, int y) {
  if (x > 0 && y >= 0) return 1;
  if (x <= 0 && y > 0) return 2;
  if (x < 0 && y <= 0) return 3;
  if (x >= 0 && y < 0) return 4;
  return 0;
}

namespace detail {
inline cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}
inline double wrap_angle(double a) {
  a = std::remainder(a, 2 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2 * std::numbers::pi : a;
}
}  // namespace detail

inline SymmetryMatrix fourfold_sigma(int L) {
  if (L < 1) throw validation_error("fourfold_sigma: L must be >= 1");
  const SquareGrid g{L};
  const cplx i{0, 1};
  // Symmetric unitary block over the quadrant indices of an orbit.
  const std::array<std::array<cplx, 4>, 4> u{{{0, 1, 0, -i},
                                              {1, 0, i, 0},
                                              {0, i, 0, -1},
                                              {-i, 0, -1, 0}}};
  Matrix s = Matrix::Zero(g.size(), g.size());
  s(g.drain_index(), g.drain_index()) = 1.0;
  for (int x = -L; x <= L; ++x)
    for (int y = -L; y <= L; ++y) {
      if (x == 0 && y == 0) continue;
      const double parity = ((std::abs(x) + std::abs(y)) % 2 == 0) ? 1.0 : -1.0;
      const int qn = quadrant(x, y);
      int mx = x, my = y;
      for (int l = 0; l < 4; ++l) {
        const int qm = quadrant(mx, my);
        s(g.index(mx, my), g.index(x, y)) = parity * u[qm - 1][qn - 1] / std::numbers::sqrt2;
        const auto r = rotate90(mx, my);
        mx = r[0], my = r[1];
      }
    }
  return SymmetryMatrix{std::move(s), g.drain_index()};
}

/// Bond from (x, y) to its +x neighbor (horizontal) or +y neighbor (vertical).
struct Bond {
  int x = 0, y = 0;
  bool vertical = false;
};

struct PlaquetteId {
  int nx = 0, ny = 0;  // lower-left corner; center at (nx + 1/2, ny + 1/2)
  double px() const { return nx + 0.5; }
  double py() const { return ny + 0.5; }
};

/// Gauge-invariant flux through a four-site plaquette: the accumulated
/// hopping phase around the loop, in (-pi, pi].
inline double plaquette_flux(const Hamiltonian &h, PlaquetteId p) {
  const SquareGrid g = grid_for_dim(h.dim());
  if (!g.contains(p.nx, p.ny) || !g.contains(p.nx + 1, p.ny + 1))
    throw dimension_mismatch("plaquette_flux: plaquette outside lattice");
  const auto hop = [&](int ax, int ay, int bx, int by) {
    const cplx v = h.mat(g.index(ax, ay), g.index(bx, by));
    if (std::abs(v) == 0.0)
      throw validation_error("plaquette_flux: zero hopping on the loop, flux undefined");
    return v;
  };
  const cplx loop = hop(p.nx, p.ny, p.nx, p.ny + 1) * hop(p.nx, p.ny + 1, p.nx + 1, p.ny + 1) *
                    hop(p.nx + 1, p.ny + 1, p.nx + 1, p.ny) * hop(p.nx + 1, p.ny, p.nx, p.ny);
  return std::arg(loop);
}

struct FluxRow {
  PlaquetteId id;
  double flux;
};

inline std::vector<FluxRow> flux_table(const Hamiltonian &h) {
  const SquareGrid g = grid_for_dim(h.dim());
  std::vector<FluxRow> rows;
  for (int ny = -g.L; ny < g.L; ++ny)
    for (int nx = -g.L; nx < g.L; ++nx)
      rows.push_back({PlaquetteId{nx, ny}, plaquette_flux(h, PlaquetteId{nx, ny})});
  return rows;
}

/// Central flux pattern produced by drain couplings of equal magnitude;
/// the sum is pi as required, split symmetrically between the quadrants.
inline constexpr std::array<double, 4> fourfold_default_central{
    std::numbers::pi / 4, -3 * std::numbers::pi / 4, -3 * std::numbers::pi / 4,
    std::numbers::pi / 4};

struct FourfoldParams {
  int L = 2;
  // |J| for quadrant-1 bonds and (when uniform_drain) the drain couplings.
  double hopping = 1.0;
  // Flux through every non-central quadrant-1 plaquette; realized with a
  // Landau-type gauge unless seed_hopping overrides the bonds directly.
  double q1_flux = std::numbers::pi / 2;
  // On-site potential on quadrant-1 sites; other quadrants get alternating
  // signs under rotation. Defaults to zero.
  std::function<double(int, int)> potential;
  // Hopping amplitude J for each quadrant-1 bond (H entry is -J). When set,
  // q1_flux is ignored.
  std::function<cplx(Bond)> seed_hopping;
  // Target fluxes through the four central plaquettes, quadrant order
  // (1/2,1/2), (-1/2,1/2), (-1/2,-1/2), (1/2,-1/2). Must sum to pi mod 2pi.
  std::array<double, 4> central_fluxes = fourfold_default_central;
  // Require all four drain couplings to have magnitude `hopping`.
  bool uniform_drain = true;
};

struct drain_incompatible : validation_error {
  double achievable_x_plus, achievable_x_minus;
  drain_incompatible(const std::string &msg, double ap, double am)
      : validation_error(msg), achievable_x_plus(ap), achievable_x_minus(am) {}
};

inline Hamiltonian fourfold_hamiltonian(const FourfoldParams &p) {
  using detail::ipow;
  using detail::wrap_angle;
  constexpr double pi = std::numbers::pi;
  if (p.L < 1) throw validation_error("fourfold_hamiltonian: L must be >= 1");
  if (!(p.hopping > 0)) throw validation_error("fourfold_hamiltonian: hopping must be > 0");
  const SquareGrid g{p.L};
  Matrix h = Matrix::Zero(g.size(), g.size());

  // On-site potentials: quadrant 1 free, signs alternate around each orbit.
  for (int x = 1; x <= p.L; ++x)
    for (int y = 0; y <= p.L; ++y) {
      if (quadrant(x, y) != 1) continue;
      const double v = p.potential ? p.potential(x, y) : 0.0;
      int mx = x, my = y;
      for (int l = 0; l < 4; ++l) {
        h(g.index(mx, my), g.index(mx, my)) = (l % 2 == 0) ? v : -v;
        const auto r = rotate90(mx, my);
        mx = r[0], my = r[1];
      }
    }

  const auto seed_value = [&](Bond b) -> cplx {
    if (p.seed_hopping) return p.seed_hopping(b);
    // Landau gauge: horizontal bonds real, vertical bonds carry -q1_flux
    // per unit x, which threads q1_flux through each quadrant-1 plaquette.
    const double phase = b.vertical ? -p.q1_flux * b.x : 0.0;
    return std::polar(p.hopping, phase);
  };

  // Quadrant-1 seed bonds (midpoint in quadrant 1, drain bonds excluded),
  // propagated around their rotation orbits.
  const auto place_orbit = [&](Bond b) {
    const cplx j = seed_value(b);
    if (std::abs(j) == 0.0)
      throw validation_error("fourfold_hamiltonian: seed hopping must be nonzero");
    int ax = b.x, ay = b.y;
    int bx = b.vertical ? b.x : b.x + 1, by = b.vertical ? b.y + 1 : b.y;
    cplx value = -j;  // H entry convention: H(m,n) = -J(m,n) on bonds
    for (int l = 0; l < 4; ++l) {
      h(g.index(ax, ay), g.index(bx, by)) = value;
      h(g.index(bx, by), g.index(ax, ay)) = std::conj(value);
      value = ipow(quadrant(ax, ay) - quadrant(bx, by)) * std::conj(value);
      const auto ra = rotate90(ax, ay), rb = rotate90(bx, by);
      ax = ra[0], ay = ra[1], bx = rb[0], by = rb[1];
    }
  };
  for (int x = 0; x < p.L; ++x)  // horizontal seeds: midpoint (x+1/2, y)
    for (int y = 0; y <= p.L; ++y)
      if (!(x == 0 && y == 0)) place_orbit(Bond{x, y, false});
  for (int x = 1; x <= p.L; ++x)  // vertical seeds: midpoint (x, y+1/2)
    for (int y = 0; y < p.L; ++y) place_orbit(Bond{x, y, true});

  // Drain couplings. The two y-couplings u e^{i alpha}, w e^{i gamma} are
  // free; the x-couplings follow from them. Solving the four central flux
  // targets fixes gamma - alpha, the ratio w/u and alpha itself; the target
  // sum must be pi and one combination is restricted by the coupling rule.
  const auto &t = p.central_fluxes;
  if (std::abs(wrap_angle(t[0] + t[1] + t[2] + t[3] - pi)) > 1e-9)
    throw validation_error("fourfold_hamiltonian: central fluxes must sum to pi (mod 2pi)");
  const auto arc = [&](int ax, int ay, int mx, int my, int bx, int by) {
    const cplx v = h(g.index(ax, ay), g.index(mx, my)) * h(g.index(mx, my), g.index(bx, by));
    if (std::abs(v) == 0.0)
      throw validation_error("fourfold_hamiltonian: central plaquette bond vanished");
    return std::arg(v);
  };
  // Non-drain arcs of the four central plaquettes; the third flux equation
  // is redundant (the sum rule), so beta3 is never needed.
  const double beta1 = arc(0, 1, 1, 1, 1, 0);
  const double beta2 = arc(-1, 0, -1, 1, 0, 1);
  const double beta4 = arc(1, 0, 1, -1, 0, -1);

  const double delta = wrap_angle(-(t[0] - beta1) - (t[3] - beta4));  // gamma - alpha
  const double d_req = wrap_angle((t[0] - beta1) + (t[1] - beta2));   // a_x- - a_x+
  const cplx eid = std::polar(1.0, -delta);
  const auto d_of = [&](double rho) {
    return std::arg(cplx{0, 1} + rho * eid) - std::arg(cplx{1, 0} + cplx{0, 1} * rho * eid) + pi;
  };
  const auto gap = [&](double psi) { return wrap_angle(d_of(std::tan(psi)) - d_req); };
  double lo = 1e-8, hi = pi / 2 - 1e-8, glo = gap(lo), ghi = gap(hi);
  if (glo == 0.0) hi = lo;
  else if (ghi == 0.0) lo = hi;
  else if ((glo > 0) == (ghi > 0)) {
    const double ax_plus = p.hopping * std::sqrt(std::max(0.0, 1.0 + std::sin(delta)));
    const double ax_minus = p.hopping * std::sqrt(std::max(0.0, 1.0 - std::sin(delta)));
    throw drain_incompatible(
        "fourfold_hamiltonian: requested central fluxes are not reachable by any "
        "drain couplings; with equal-magnitude couplings the achievable x-coupling "
        "magnitudes are " + std::to_string(ax_plus) + " and " + std::to_string(ax_minus),
        ax_plus, ax_minus);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = (lo + hi) / 2, gm = gap(mid);
    if (gm == 0.0) { lo = hi = mid; break; }
    ((gm > 0) == (glo > 0) ? lo : hi) = mid;
  }
  const double rho = std::tan((lo + hi) / 2);

  if (p.uniform_drain && (std::abs(std::sin(delta)) > 1e-9 || std::abs(rho - 1.0) > 1e-9)) {
    const double ax_plus = p.hopping * std::sqrt(std::max(0.0, 1.0 + std::sin(delta)));
    const double ax_minus = p.hopping * std::sqrt(std::max(0.0, 1.0 - std::sin(delta)));
    throw drain_incompatible(
        "fourfold_hamiltonian: central fluxes incompatible with uniform drain coupling "
        "magnitude; achievable x-coupling magnitudes at uniform y-couplings are " +
            std::to_string(ax_plus) + " and " + std::to_string(ax_minus),
        ax_plus, ax_minus);
  }
  const double u = p.uniform_drain ? p.hopping : p.hopping / std::sqrt(rho);
  const double w = p.uniform_drain ? p.hopping : p.hopping * std::sqrt(rho);
  const double alpha =
      wrap_angle(t[0] - beta1 + std::arg(cplx{1, 0} + cplx{0, 1} * rho * eid)) / 2;
  const double gamma = alpha + delta;

  const cplx hy_plus = std::polar(u, alpha), hy_minus = std::polar(w, gamma);
  const cplx hx_plus = (std::conj(hy_plus) + cplx{0, 1} * std::conj(hy_minus)) / std::numbers::sqrt2;
  const cplx hx_minus =
      -(std::conj(hy_minus) + cplx{0, 1} * std::conj(hy_plus)) / std::numbers::sqrt2;
  const auto set_drain = [&](int x, int y, cplx v) {
    h(g.drain_index(), g.index(x, y)) = v;
    h(g.index(x, y), g.drain_index()) = std::conj(v);
  };
  set_drain(0, 1, hy_plus);
  set_drain(0, -1, hy_minus);
  set_drain(1, 0, hx_plus);
  set_drain(-1, 0, hx_minus);

  Hamiltonian result{std::move(h)};
  // The flux solve relies on the propagation identities; verify the targets.
  const std::array<PlaquetteId, 4> central{PlaquetteId{0, 0}, PlaquetteId{-1, 0},
                                           PlaquetteId{-1, -1}, PlaquetteId{0, -1}};
  for (int k = 0; k < 4; ++k)
    if (std::abs(wrap_angle(plaquette_flux(result, central[k]) - t[k])) > 1e-9)
      throw std::logic_error("fourfold_hamiltonian: central flux solve failed");
  return result;
}

// Named potential patterns used for the robustness sweeps. Both vanish at
// the drain and respect the sign-alternation rule.
inline FourfoldParams fourfold_alternating(int L, double strength, double hopping = 1.0) {
  FourfoldParams p;
  p.L = L;
  p.hopping = hopping;
  p.potential = [strength](int x, int y) {
    return (quadrant(x, y) % 2 == 1) ? -strength : strength;
  };
  return p;
}

inline FourfoldParams fourfold_saddle(int L, double strength, double hopping = 1.0) {
  FourfoldParams p;
  p.L = L;
  p.hopping = hopping;
  p.potential = [strength, L](int x, int y) {
    return strength * double(x) * double(y) / double(L * L);
  };
  return p;
}

/// The worked 5x5 example: uniform hopping J, alternating potential J/2,
/// quarter-turn flux in the outer first-quadrant plaquettes.
inline FourfoldParams fourfold_example(int L = 2, double potential_strength = 0.5,
                                       double hopping = 1.0) {
  return fourfold_alternating(L, potential_strength, hopping);
}

inline LatticeSpec fourfold_lattice(int L) {
  const SquareGrid g{L};
  LatticeSpec lat;
  for (int idx = 0; idx < g.size(); ++idx) {
    const auto c = g.coord(idx);
    lat.sites.push_back({c[0], c[1]});
  }
  lat.drain = g.drain_index();
  for (int y = -L; y <= L; ++y)
    for (int x = -L; x <= L; ++x) {
      if (x + 1 <= L) lat.edges.emplace_back(g.index(x, y), g.index(x + 1, y));
      if (y + 1 <= L) lat.edges.emplace_back(g.index(x, y), g.index(x, y + 1));
    }
  for (auto &[a, b] : lat.edges)
    if (a > b) std::swap(a, b);
  std::sort(lat.edges.begin(), lat.edges.end());
  lat.validate();
  return lat;
}

}  // namespace chiralsq
