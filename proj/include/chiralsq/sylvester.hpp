#pragma once

// Dense complex Sylvester solves via the Schur form (Bartels-Stewart).
// Both fixed-point equations of the moment flow reduce to
//   W X + X W^dag = C   and   W X + X W^T = C
// with the same left coefficient W, so one Schur factorization serves both.

#include "chiralsq/types.hpp"

namespace chiralsq {

class SylvesterSolver {
 public:
  explicit SylvesterSolver(const Matrix &w) : n_(static_cast<int>(w.rows())) {
    if (w.rows() != w.cols()) throw dimension_mismatch("sylvester: W not square");
    Eigen::ComplexSchur<Matrix> schur(w);
    if (schur.info() != Eigen::Success) throw std::runtime_error("sylvester: Schur failed");
    q_ = schur.matrixU();
    t_ = schur.matrixT();
  }

  Eigen::VectorXcd eigenvalues() const { return t_.diagonal(); }

  /// min_{i,j} |lambda_i + conj(lambda_j)|: conditioning of W X + X W^dag = C.
  double min_decay_dag() const { return min_combination(true); }
  /// min_{i,j} |lambda_i + lambda_j|: conditioning of W X + X W^T = C.
  double min_decay_transpose() const { return min_combination(false); }

  /// Solves W X + X W^dag = C.
  Matrix solve_dag(const Matrix &c) const {
    check(c);
    const Matrix d = q_.adjoint() * c * q_;
    Matrix y = Matrix::Zero(n_, n_);
    for (int i = n_ - 1; i >= 0; --i)
      for (int j = n_ - 1; j >= 0; --j) {
        cplx rhs = d(i, j);
        for (int k = i + 1; k < n_; ++k) rhs -= t_(i, k) * y(k, j);
        for (int k = j + 1; k < n_; ++k) rhs -= y(i, k) * std::conj(t_(j, k));
        y(i, j) = rhs / (t_(i, i) + std::conj(t_(j, j)));
      }
    return q_ * y * q_.adjoint();
  }

  /// Solves W X + X W^T = C.
  Matrix solve_transpose(const Matrix &c) const {
    check(c);
    const Matrix d = q_.adjoint() * c * q_.conjugate();
    Matrix y = Matrix::Zero(n_, n_);
    for (int i = n_ - 1; i >= 0; --i)
      for (int j = n_ - 1; j >= 0; --j) {
        cplx rhs = d(i, j);
        for (int k = i + 1; k < n_; ++k) rhs -= t_(i, k) * y(k, j);
        for (int k = j + 1; k < n_; ++k) rhs -= y(i, k) * t_(j, k);
        y(i, j) = rhs / (t_(i, i) + t_(j, j));
      }
    return q_ * y * q_.transpose();
  }

 private:
  void check(const Matrix &c) const {
    if (c.rows() != n_ || c.cols() != n_)
      throw dimension_mismatch("sylvester: right-hand side dimension mismatch");
  }

  double min_combination(bool conjugate) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const cplx lj = conjugate ? std::conj(t_(j, j)) : t_(j, j);
        best = std::min(best, std::abs(t_(i, i) + lj));
      }
    return best;
  }

  int n_;
  Matrix q_, t_;
};

}  // namespace chiralsq
