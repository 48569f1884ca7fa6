#include "clab/solvers.hpp"

#include <cmath>

namespace clab {

namespace {

Matrix regularized_gram(const Matrix& X, double shift) {
  // X^T X + shift * I, exactly symmetric.
  Matrix G = Matrix::Zero(X.cols(), X.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  G.triangularView<Eigen::StrictlyUpper>() =
      G.transpose().triangularView<Eigen::StrictlyUpper>();
  G.diagonal().array() += shift;
  return G;
}

Matrix regularized_outer(const Matrix& X, double shift) {
  // X X^T + shift * I, exactly symmetric.
  Matrix B = Matrix::Zero(X.rows(), X.rows());
  B.selfadjointView<Eigen::Lower>().rankUpdate(X);
  B.triangularView<Eigen::StrictlyUpper>() =
      B.transpose().triangularView<Eigen::StrictlyUpper>();
  B.diagonal().array() += shift;
  return B;
}

void check_task_shapes(const Vector& w0, const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) {
    throw std::invalid_argument("ridge_solve: rows(X) != dim(y)");
  }
  if (X.rows() > 0 && X.cols() != w0.size()) {
    throw std::invalid_argument("ridge_solve: cols(X) != dim(w0)");
  }
}

}  // namespace

RidgeConfig::RidgeConfig(double lambda_) : lambda(lambda_) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument("RidgeConfig: lambda must be finite and >= 0");
  }
}

double QuadraticForm::loss_at(const Vector& w0) const {
  return 0.5 * (A * w0 - c).squaredNorm();
}

Vector QuadraticForm::grad_at(const Vector& w0) const {
  return A.transpose() * (A * w0 - c);
}

QuadraticAccumulator::QuadraticAccumulator(Index d)
    : M_(Matrix::Zero(d, d)), b_(Vector::Zero(d)) {
  if (d < 1) {
    throw std::invalid_argument("QuadraticAccumulator: d must be >= 1");
  }
}

void QuadraticAccumulator::add(const QuadraticForm& form) {
  if (form.A.cols() != M_.rows() || form.A.rows() != form.c.size()) {
    throw std::invalid_argument("QuadraticAccumulator: form shape mismatch");
  }
  M_.selfadjointView<Eigen::Lower>().rankUpdate(form.A.transpose());
  M_.triangularView<Eigen::StrictlyUpper>() =
      M_.transpose().triangularView<Eigen::StrictlyUpper>();
  b_.noalias() += form.A.transpose() * form.c;
  ++count_;
}

void QuadraticAccumulator::merge(const QuadraticAccumulator& other) {
  if (other.dim() != dim()) {
    throw std::invalid_argument("QuadraticAccumulator: dimension mismatch");
  }
  M_ += other.M_;
  b_ += other.b_;
  count_ += other.count_;
}

Vector ridge_solve(const Vector& w0, const Matrix& X, const Vector& y,
                   const RidgeConfig& cfg) {
  check_task_shapes(w0, X, y);
  const Index n = X.rows();
  const Index d = w0.size();
  if (n == 0) return w0;

  const Vector r = y - X * w0;
  if (cfg.lambda == 0.0) {
    return w0 + min_norm_interpolate(X, r);
  }
  const double shift = double(n) * cfg.lambda;
  if (n < d) {
    // Dual form: (X^T X + shift I)^-1 X^T == X^T (X X^T + shift I)^-1.
    SpdSolver dual(regularized_outer(X, shift));
    return w0 + X.transpose() * dual.solve(r);
  }
  SpdSolver primal(regularized_gram(X, shift));
  return w0 + primal.solve(X.transpose() * r);
}

double split_loss(const Vector& w0, const TaskSample& task,
                  const SplitConfig& split, const RidgeConfig& cfg) {
  if (cfg.lambda == 0.0 && split.n1 == 0) {
    throw std::invalid_argument("split_loss: lambda == 0 with empty train split");
  }
  auto [train, val] = split_task(task, split);
  const Vector w = ridge_solve(w0, train.X, train.y, cfg);
  return (val.y - val.X * w).squaredNorm() / (2.0 * double(split.n2));
}

double nonsplit_loss(const Vector& w0, const TaskSample& task,
                     const RidgeConfig& cfg) {
  if (cfg.lambda <= 0.0) {
    throw std::invalid_argument("nonsplit_loss: requires lambda > 0");
  }
  const Index n = task.X.rows();
  const Vector w = ridge_solve(w0, task.X, task.y, cfg);
  return (task.y - task.X * w).squaredNorm() / (2.0 * double(n));
}

QuadraticForm assemble_split_quadratic(const TaskSample& task,
                                       const SplitConfig& split,
                                       const RidgeConfig& cfg) {
  if (cfg.lambda <= 0.0) {
    throw std::invalid_argument("assemble_split_quadratic: requires lambda > 0");
  }
  auto [train, val] = split_task(task, split);
  const double root_n2 = std::sqrt(double(split.n2));

  QuadraticForm form;
  if (split.n1 == 0) {
    // Identity inner map.
    form.A = val.X / root_n2;
    form.c = val.y / root_n2;
    return form;
  }

  // G = X_tr^T X_tr / n1 + lambda I.
  Matrix G = regularized_gram(train.X / std::sqrt(double(split.n1)), cfg.lambda);
  SpdSolver g(std::move(G));
  form.A = (cfg.lambda / root_n2) * g.solve_matrix(val.X.transpose()).transpose();
  const Vector h = g.solve(train.X.transpose() * train.y / double(split.n1));
  form.c = (val.y - val.X * h) / root_n2;
  return form;
}

QuadraticForm assemble_nonsplit_quadratic(const TaskSample& task,
                                          const RidgeConfig& cfg) {
  if (cfg.lambda <= 0.0) {
    throw std::invalid_argument("assemble_nonsplit_quadratic: requires lambda > 0");
  }
  const Index n = task.X.rows();
  const Index d = task.X.cols();
  if (n < 1) {
    throw std::invalid_argument("assemble_nonsplit_quadratic: empty task");
  }
  const double root_n = std::sqrt(double(n));

  QuadraticForm form;
  if (n < d) {
    // Dual identities: X (X^T X / n + l I)^-1 = (X X^T / n + l I)^-1 X and
    // (I - X (X^T X + n l I)^-1 X^T) y = l (X X^T / n + l I)^-1 y.
    SpdSolver dual(regularized_outer(task.X / root_n, cfg.lambda));
    form.A = (cfg.lambda / root_n) * dual.solve_matrix(task.X);
    form.c = (cfg.lambda / root_n) * dual.solve(task.y);
    return form;
  }
  SpdSolver primal(regularized_gram(task.X / root_n, cfg.lambda));
  form.A = (cfg.lambda / root_n) * primal.solve_matrix(task.X.transpose()).transpose();
  const Vector h = primal.solve(task.X.transpose() * task.y / double(n));
  form.c = (task.y - task.X * h) / root_n;
  return form;
}

Vector erm_solve(const QuadraticAccumulator& acc) {
  if (acc.count() < 1) {
    throw SingularSystemError("erm_solve: empty accumulator");
  }
  // Solve with the per-task averages so the pivot test sees O(1) scales.
  const double scale = 1.0 / double(acc.count());
  try {
    SpdSolver solver(scale * acc.hessian_sum());
    return solver.solve(scale * acc.moment_sum());
  } catch (const NotPositiveDefiniteError&) {
    throw SingularSystemError(
        "erm_solve: accumulated normal matrix is singular; "
        "the experiment has too few informative rows");
  }
}

Matrix sandwich_covariance(std::span<const QuadraticForm> forms,
                           const Vector& w_hat) {
  if (forms.empty()) {
    throw std::invalid_argument("sandwich_covariance: no forms");
  }
  const Index d = w_hat.size();
  const double inv_t = 1.0 / double(forms.size());
  Matrix hessian = Matrix::Zero(d, d);
  Matrix grad_cov = Matrix::Zero(d, d);
  for (const QuadraticForm& form : forms) {
    hessian.selfadjointView<Eigen::Lower>().rankUpdate(form.A.transpose(), inv_t);
    const Vector g = form.grad_at(w_hat);
    grad_cov.selfadjointView<Eigen::Lower>().rankUpdate(g, inv_t);
  }
  hessian.triangularView<Eigen::StrictlyUpper>() =
      hessian.transpose().triangularView<Eigen::StrictlyUpper>();
  grad_cov.triangularView<Eigen::StrictlyUpper>() =
      grad_cov.transpose().triangularView<Eigen::StrictlyUpper>();

  try {
    SpdSolver h(std::move(hessian));
    const Matrix half = h.solve_matrix(grad_cov);
    const Matrix full = h.solve_matrix(half.transpose());
    return 0.5 * (full + full.transpose());
  } catch (const NotPositiveDefiniteError&) {
    throw SingularSystemError("sandwich_covariance: singular mean Hessian");
  }
}

}  // namespace clab
