#include "clab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace clab {

namespace {

constexpr double kPivotFloor = 1e-13;
constexpr double kSymmetryTol = 1e-12;

void require_symmetric(const Matrix& S, const char* what) {
  if (S.rows() != S.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  }
  const double scale = std::max(1e-300, S.cwiseAbs().maxCoeff());
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
  }
}

}  // namespace

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("gaussian_matrix: rows and cols must be >= 1");
  }
  Matrix out(rows, cols);
  // Column-major fill matches the storage order.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      out(i, j) = rng.next_gaussian();
    }
  }
  return out;
}

Vector gaussian_vector(Rng& rng, Index dim) {
  if (dim < 1) {
    throw std::invalid_argument("gaussian_vector: dim must be >= 1");
  }
  Vector out(dim);
  for (Index i = 0; i < dim; ++i) {
    out(i) = rng.next_gaussian();
  }
  return out;
}

Vector sym_eigvals(const Matrix& S) {
  require_symmetric(S, "sym_eigvals");
  // Symmetrize so the solver sees an exactly symmetric matrix.
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eigvals: eigendecomposition failed");
  }
  return solver.eigenvalues().reverse();
}

Vector gram_eigvals(const Matrix& X) {
  const Index m = X.rows();
  const Index d = X.cols();
  if (m < 1 || d < 1) {
    throw std::invalid_argument("gram_eigvals: empty matrix");
  }
  if (m >= d) {
    Matrix gram(d, d);
    gram.setZero();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0 / double(m));
    gram.triangularView<Eigen::StrictlyUpper>() =
        gram.transpose().triangularView<Eigen::StrictlyUpper>();
    return sym_eigvals(gram);
  }
  // Underdetermined case: squared singular values of X / sqrt(m); the Gram
  // matrix has exactly d - m trailing zeros.
  Eigen::BDCSVD<Matrix> svd(X / std::sqrt(double(m)));
  Vector vals = Vector::Zero(d);
  const Vector& sv = svd.singularValues();
  for (Index i = 0; i < sv.size(); ++i) {
    vals(i) = sv(i) * sv(i);
  }
  return vals;
}

SpdSolver::SpdSolver(Matrix S) : S_(std::move(S)) {
  require_symmetric(S_, "SpdSolver");
  llt_.compute(S_);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("SpdSolver: matrix is not positive definite");
  }
  // Eigen accepts arbitrarily small positive pivots; enforce the floor.
  const auto& L = llt_.matrixLLT();
  for (Index j = 0; j < S_.rows(); ++j) {
    if (L(j, j) * L(j, j) < kPivotFloor) {
      throw NotPositiveDefiniteError("SpdSolver: pivot below 1e-13");
    }
  }
}

Vector SpdSolver::solve(const Vector& b) const {
  Vector x = llt_.solve(b);
  const double bnorm = b.norm();
  // Iterative refinement keeps the residual near machine level even at
  // condition numbers approaching 1e8.
  for (int pass = 0; pass < 2; ++pass) {
    Vector r = b - S_ * x;
    if (r.norm() <= 1e-13 * bnorm) break;
    x += llt_.solve(r);
  }
  return x;
}

Matrix SpdSolver::solve_matrix(const Matrix& B) const {
  Matrix X = llt_.solve(B);
  Matrix R = B - S_ * X;
  if (R.cwiseAbs().maxCoeff() > 1e-13 * std::max(1.0, B.cwiseAbs().maxCoeff())) {
    X += llt_.solve(R);
  }
  return X;
}

Vector solve_spd(const Matrix& S, const Vector& b) {
  if (S.rows() != b.size()) {
    throw std::invalid_argument("solve_spd: dimension mismatch");
  }
  return SpdSolver(S).solve(b);
}

Vector min_norm_interpolate(const Matrix& X, const Vector& r) {
  if (X.rows() != r.size()) {
    throw std::invalid_argument("min_norm_interpolate: dimension mismatch");
  }
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  return svd.solve(r);
}

}  // namespace clab
