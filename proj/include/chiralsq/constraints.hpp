#pragma once

// Linear constraint engine: given a Hamiltonian template (which entries are
// fixed, free, or absent) and a target symmetry sigma, solve
// sigma^dag H sigma + H^* = 0 for the free entries. The relation mixes H
// and H^*, so it is linear over the reals only; unknowns are the real and
// imaginary parts of the free entries, expanded in a Frobenius-orthonormal
// Hermitian basis so that solver-space geometry matches matrix geometry.

#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "chiralsq/chiral.hpp"
#include "chiralsq/io.hpp"
#include "chiralsq/types.hpp"

namespace chiralsq {

enum class EntryTag { Zero, Fixed, FreeReal, FreeComplex };

class HTemplate {
 public:
  explicit HTemplate(int dim) : dim_(dim) {
    if (dim < 1) throw validation_error("template: dim must be >= 1");
    tags_.assign(std::size_t(dim) * (dim + 1) / 2, EntryTag::Zero);
    values_.assign(tags_.size(), cplx{0, 0});
  }

  int dim() const { return dim_; }

  void set(int m, int n, EntryTag tag, cplx value = {0, 0}) {
    if (m > n) throw validation_error("template: entries are indexed with m <= n");
    if (m == n) {
      if (tag == EntryTag::FreeComplex)
        throw validation_error("template: diagonal entries cannot be FreeComplex");
      if (tag == EntryTag::Fixed && value.imag() != 0.0)
        throw validation_error("template: fixed diagonal values must be real");
    }
    tags_[flat(m, n)] = tag;
    values_[flat(m, n)] = tag == EntryTag::Fixed ? value : cplx{0, 0};
  }

  EntryTag tag(int m, int n) const { return tags_[flat(std::min(m, n), std::max(m, n))]; }

  cplx fixed_value(int m, int n) const {
    const cplx v = values_[flat(std::min(m, n), std::max(m, n))];
    return m <= n ? v : std::conj(v);
  }

  /// The Hermitian matrix holding all Fixed entries, zero elsewhere.
  Matrix fixed_part() const {
    Matrix f = Matrix::Zero(dim_, dim_);
    for (int m = 0; m < dim_; ++m)
      for (int n = m; n < dim_; ++n)
        if (tag(m, n) == EntryTag::Fixed) {
          f(m, n) = fixed_value(m, n);
          f(n, m) = std::conj(f(m, n));
        }
    return f;
  }

 private:
  std::size_t flat(int m, int n) const {
    if (m < 0 || n < 0 || m >= dim_ || n >= dim_ || m > n)
      throw dimension_mismatch("template: entry index out of range");
    return std::size_t(m) * dim_ - std::size_t(m) * (m - 1) / 2 + (n - m);
  }

  int dim_;
  std::vector<EntryTag> tags_;
  std::vector<cplx> values_;
};

/// One real unknown: the re or im part of a free template entry.
struct UnknownDesc {
  int m = 0, n = 0;
  bool imag = false;
};

/// Hermitian, Frobenius-orthonormal basis matrix of one unknown.
inline Matrix unknown_basis(const UnknownDesc &u, int dim) {
  Matrix b = Matrix::Zero(dim, dim);
  if (u.m == u.n) {
    b(u.m, u.m) = 1.0;
  } else if (!u.imag) {
    b(u.m, u.n) = b(u.n, u.m) = 1.0 / std::numbers::sqrt2;
  } else {
    b(u.m, u.n) = cplx{0, 1} / std::numbers::sqrt2;
    b(u.n, u.m) = cplx{0, -1} / std::numbers::sqrt2;
  }
  return b;
}

inline std::vector<UnknownDesc> template_unknowns(const HTemplate &t) {
  std::vector<UnknownDesc> u;
  for (int m = 0; m < t.dim(); ++m)
    for (int n = m; n < t.dim(); ++n) {
      const EntryTag tag = t.tag(m, n);
      if (tag == EntryTag::FreeReal || tag == EntryTag::FreeComplex)
        u.push_back({m, n, false});
      if (tag == EntryTag::FreeComplex) u.push_back({m, n, true});
    }
  return u;
}

inline Matrix chiral_map(const Matrix &x, const SymmetryMatrix &sigma) {
  return sigma.mat.adjoint() * x * sigma.mat + x.conjugate();
}

/// Assembled real system A x = b; row 2(iN+j) is the real part of entry
/// (i,j) of the symmetry relation, row 2(iN+j)+1 the imaginary part.
struct LinearSystem {
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
  std::vector<UnknownDesc> unknowns;

  // Maps an equation row back to the offending matrix entry.
  static std::tuple<int, int, bool> equation_entry(int row, int dim) {
    return {row / 2 / dim, (row / 2) % dim, row % 2 == 1};
  }
};

namespace detail {
inline void vec_real(const Matrix &m, Eigen::Ref<Eigen::VectorXd> out) {
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out(2 * (i * n + j)) = m(i, j).real();
      out(2 * (i * n + j) + 1) = m(i, j).imag();
    }
}
}  // namespace detail

inline LinearSystem assemble(const HTemplate &t, const SymmetryMatrix &sigma) {
  if (t.dim() != sigma.dim())
    throw dimension_mismatch("assemble: template and sigma dimensions differ");
  if (!is_valid_symmetry(sigma).valid)
    throw validation_error("assemble: sigma fails the symmetry conditions");
  const int n = t.dim();
  LinearSystem sys;
  sys.unknowns = template_unknowns(t);
  const int k = static_cast<int>(sys.unknowns.size());
  sys.lhs.resize(2 * n * n, k);
  sys.rhs.resize(2 * n * n);
  for (int u = 0; u < k; ++u)
    detail::vec_real(chiral_map(unknown_basis(sys.unknowns[u], n), sigma), sys.lhs.col(u));
  detail::vec_real(-chiral_map(t.fixed_part(), sigma), sys.rhs);
  return sys;
}

struct Infeasible {
  double residual = 0.0;     // smallest max-abs violation achievable
  int equation_index = 0;    // worst-violated equation row
  int m = 0, n = 0;          // matrix entry that equation belongs to
  bool imag_part = false;
};

struct ConstraintSolution {
  Hamiltonian particular;
  std::vector<Matrix> basis;  // Hermitian, Frobenius-orthonormal
  int n_free = 0;
};

inline std::variant<ConstraintSolution, Infeasible> solve(const HTemplate &t,
                                                          const SymmetryMatrix &sigma,
                                                          double tolerance = tol::constraint) {
  const LinearSystem sys = assemble(t, sigma);
  const int n = t.dim();
  const int k = static_cast<int>(sys.unknowns.size());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd kernel(k, 0);
  if (k > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sys.lhs, Eigen::ComputeThinU | Eigen::ComputeFullV);
    svd.setThreshold(tolerance);
    x = svd.solve(sys.rhs);
    const int rank = static_cast<int>(svd.rank());
    kernel = svd.matrixV().rightCols(k - rank);
  }

  Eigen::VectorXd residual = sys.rhs;
  if (k > 0) residual -= sys.lhs * x;
  int worst = 0;
  const double res = residual.size() ? residual.cwiseAbs().maxCoeff(&worst) : 0.0;
  if (res > tolerance) {
    const auto [m, nn, imag] = LinearSystem::equation_entry(worst, n);
    return Infeasible{res, worst, m, nn, imag};
  }

  ConstraintSolution sol;
  Matrix particular = t.fixed_part();
  for (int u = 0; u < k; ++u) particular += x(u) * unknown_basis(sys.unknowns[u], n);
  sol.particular = make_hamiltonian(particular);
  sol.n_free = static_cast<int>(kernel.cols());
  for (int c = 0; c < kernel.cols(); ++c) {
    Eigen::VectorXd v = kernel.col(c);
    for (int u = 0; u < k; ++u)
      if (std::abs(v(u)) > 1e-12) {  // sign convention: leading component positive
        if (v(u) < 0) v = -v;
        break;
      }
    Matrix b = Matrix::Zero(n, n);
    for (int u = 0; u < k; ++u) b += v(u) * unknown_basis(sys.unknowns[u], n);
    sol.basis.push_back(std::move(b));
  }
  return sol;
}

inline Hamiltonian sample(const ConstraintSolution &sol, std::span<const double> coefficients) {
  if (static_cast<int>(coefficients.size()) != sol.n_free)
    throw dimension_mismatch("sample: expected " + std::to_string(sol.n_free) +
                             " coefficients, got " + std::to_string(coefficients.size()));
  Matrix h = sol.particular.mat;
  for (int i = 0; i < sol.n_free; ++i) h += coefficients[i] * sol.basis[i];
  return make_hamiltonian(h);
}

// ---- template JSON ----

inline std::string save_template(const HTemplate &t) {
  std::ostringstream os;
  os << "{\"dim\": " << t.dim() << ", \"entries\": [";
  bool first = true;
  for (int m = 0; m < t.dim(); ++m)
    for (int n = m; n < t.dim(); ++n) {
      const EntryTag tag = t.tag(m, n);
      if (tag == EntryTag::Zero) continue;
      os << (first ? "" : ", ") << "{\"m\": " << m << ", \"n\": " << n << ", \"tag\": \"";
      first = false;
      switch (tag) {
        case EntryTag::Fixed:
          os << "fixed\", \"value\": " << io::format_complex_pair(t.fixed_value(m, n));
          break;
        case EntryTag::FreeReal: os << "free_real\""; break;
        case EntryTag::FreeComplex: os << "free_complex\""; break;
        default: break;
      }
      os << "}";
    }
  os << "]}\n";
  return os.str();
}

inline HTemplate load_template(const std::string &text) {
  const auto j = io::detail::parse_document(text, "template");
  HTemplate t(io::detail::field(j, "dim", "template").get<int>());
  for (const auto &e : io::detail::field(j, "entries", "template")) {
    const int m = io::detail::field(e, "m", "template entry").get<int>();
    const int n = io::detail::field(e, "n", "template entry").get<int>();
    const std::string tag = io::detail::field(e, "tag", "template entry").get<std::string>();
    const std::string where =
        "template entry (" + std::to_string(m) + "," + std::to_string(n) + ")";
    try {
      if (tag == "fixed")
        t.set(m, n, EntryTag::Fixed, io::detail::read_complex(io::detail::field(e, "value", where), where));
      else if (tag == "free_real")
        t.set(m, n, EntryTag::FreeReal);
      else if (tag == "free_complex")
        t.set(m, n, EntryTag::FreeComplex);
      else if (tag == "zero")
        t.set(m, n, EntryTag::Zero);
      else
        throw io::parse_error(where + ": unknown tag '" + tag + "'");
    } catch (const validation_error &err) {
      throw io::parse_error(where + ": " + err.what());
    }
  }
  return t;
}

}  // namespace chiralsq
