#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "clab/rng.hpp"

namespace clab {

// Dense real (double) matrices and vectors, column-major storage.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numeric failures that indicate a misconfigured computation rather than a
// caller programming error.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPositiveDefiniteError : NumericError {
  using NumericError::NumericError;
};
struct SingularSystemError : NumericError {
  using NumericError::NumericError;
};

// Throws std::invalid_argument when `m` contains NaN or Inf.
template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

// rows x cols matrix of i.i.d. standard normal entries, drawn from `rng` in
// column-major order. Deterministic given the generator state.
Matrix gaussian_matrix(Rng& rng, Index rows, Index cols);
Vector gaussian_vector(Rng& rng, Index dim);

// All eigenvalues of a symmetric matrix, descending. Throws
// std::invalid_argument for non-square input or relative asymmetry
// above 1e-12.
Vector sym_eigvals(const Matrix& S);

// Eigenvalues of X^T X / rows(X), descending, length cols(X).
// Uses the singular values of X / sqrt(rows) when rows < cols so the
// trailing zeros of the rank-deficient Gram matrix are exact; otherwise a
// symmetric eigendecomposition of the Gram matrix itself.
Vector gram_eigvals(const Matrix& X);

// Cholesky factorization of a symmetric positive definite matrix with the
// factorization retained for repeated solves. Construction throws
// NotPositiveDefiniteError when a pivot falls below 1e-13.
class SpdSolver {
 public:
  explicit SpdSolver(Matrix S);

  Vector solve(const Vector& b) const;
  Matrix solve_matrix(const Matrix& B) const;

  Index dim() const { return S_.rows(); }

 private:
  Matrix S_;  // retained for one step of iterative refinement
  Eigen::LLT<Matrix> llt_;
};

// One-shot SPD solve; post-condition ||Sx - b|| <= 1e-9 ||b|| on systems
// with condition number up to ~1e8.
Vector solve_spd(const Matrix& S, const Vector& b);

// Minimum-norm solution X^+ r of X w = r. Singular values below
// 1e-10 * sigma_max are treated as zero.
Vector min_norm_interpolate(const Matrix& X, const Vector& r);

}  // namespace clab
