#pragma once

#include <span>
#include <vector>

#include "clab/linalg.hpp"
#include "clab/tasks.hpp"

namespace clab {

// Regularization strength of the inner ridge solver. lambda == 0 selects the
// minimum-distance interpolation limit.
struct RidgeConfig {
  double lambda = 1.0;

  explicit RidgeConfig(double lambda_);
};

// Per-task outer loss in closed form: loss(w0) = 0.5 ||A w0 - c||^2.
struct QuadraticForm {
  Matrix A;  // m x d
  Vector c;  // m

  double loss_at(const Vector& w0) const;
  Vector grad_at(const Vector& w0) const;
};

// Streaming sum of per-task quadratics: keeps only
//   M = sum_t A_t^T A_t  and  b = sum_t A_t^T c_t,
// so memory is O(d^2) regardless of the task count. Merging accumulators is
// entrywise addition, hence associative and commutative.
class QuadraticAccumulator {
 public:
  explicit QuadraticAccumulator(Index d);

  void add(const QuadraticForm& form);
  void merge(const QuadraticAccumulator& other);

  const Matrix& hessian_sum() const { return M_; }
  const Vector& moment_sum() const { return b_; }
  long count() const { return count_; }
  Index dim() const { return M_.rows(); }

 private:
  Matrix M_;
  Vector b_;
  long count_ = 0;
};

// Ridge regression biased towards w0:
//   argmin_w  (1/n)||X w - y||^2 + lambda ||w - w0||^2
//     = w0 + (X^T X + n lambda I)^-1 X^T (y - X w0).
// lambda == 0 returns the minimum-distance interpolator w0 + X^+(y - X w0);
// an empty X returns w0 unchanged. The resolvent is applied through the
// n x n dual form when n < d.
Vector ridge_solve(const Vector& w0, const Matrix& X, const Vector& y,
                   const RidgeConfig& cfg);

// Validation loss of the inner fit on the train split:
//   (1 / 2 n2) || y_val - X_val * ridge(w0, train) ||^2.
// Requires lambda > 0 or n1 >= 1.
double split_loss(const Vector& w0, const TaskSample& task,
                  const SplitConfig& split, const RidgeConfig& cfg);

// In-sample loss of the inner fit on all n rows:
//   (1 / 2 n) || y - X * ridge(w0, X, y) ||^2.
// Requires lambda > 0; at lambda == 0 the loss degenerates to zero whenever
// the task is interpolable and is rejected.
double nonsplit_loss(const Vector& w0, const TaskSample& task,
                     const RidgeConfig& cfg);

// Exact quadratic representation of split_loss in w0 (lambda > 0):
//   A = (lambda / sqrt(n2)) X_val (X_tr^T X_tr / n1 + lambda I)^-1
//   c = (1 / sqrt(n2)) (y_val - X_val (X_tr^T X_tr / n1 + lambda I)^-1 X_tr^T y_tr / n1)
// With n1 == 0 this reduces to A = X_val / sqrt(n2), c = y_val / sqrt(n2).
QuadraticForm assemble_split_quadratic(const TaskSample& task,
                                       const SplitConfig& split,
                                       const RidgeConfig& cfg);

// Exact quadratic representation of nonsplit_loss in w0 (lambda > 0):
//   A = sqrt(n) lambda X (X^T X + n lambda I)^-1
//   c = (1 / sqrt(n)) (I - X (X^T X + n lambda I)^-1 X^T) y.
QuadraticForm assemble_nonsplit_quadratic(const TaskSample& task,
                                          const RidgeConfig& cfg);

// Minimizer of the accumulated empirical risk: w = M^-1 b via an SPD solve.
// Throws SingularSystemError when M is singular (too few informative rows);
// no silent regularization.
Vector erm_solve(const QuadraticAccumulator& acc);

// Plug-in sandwich covariance H^-1 C H^-1 of the ERM, with
//   H = (1/T) sum A^T A   and   C = (1/T) sum g g^T,  g = A^T (A w_hat - c).
// Its trace estimates the T-scaled asymptotic MSE. Throws
// SingularSystemError on a singular Hessian.
Matrix sandwich_covariance(std::span<const QuadraticForm> forms,
                           const Vector& w_hat);

}  // namespace clab
