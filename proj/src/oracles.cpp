#include "clab/oracles.hpp"

#include <cmath>

#include "clab/solvers.hpp"
#include "clab/tasks.hpp"

namespace clab {

namespace {

void require_counterexample_n(int n) {
  if (n < 1 || n > 30) {
    throw std::invalid_argument(
        "counterexample enumeration: n must be in [1, 30]");
  }
}

// Scalar streaming version of the sandwich variance for d = 1 ERMs:
// keeps the moments of (A^T A, A^T c) needed for H^-1 C H^-1 / T without
// retaining per-task forms.
struct ScalarErmAccumulator {
  double sum_aa = 0.0;    // sum A^T A
  double sum_ac = 0.0;    // sum A^T c
  double sum_aa2 = 0.0;   // sum (A^T A)^2
  double sum_aaac = 0.0;  // sum (A^T A)(A^T c)
  double sum_ac2 = 0.0;   // sum (A^T c)^2
  long count = 0;

  void add(const QuadraticForm& form) {
    const double aa = form.A.col(0).squaredNorm();
    const double ac = form.A.col(0).dot(form.c);
    sum_aa += aa;
    sum_ac += ac;
    sum_aa2 += aa * aa;
    sum_aaac += aa * ac;
    sum_ac2 += ac * ac;
    ++count;
  }

  double solve() const {
    if (sum_aa <= 0.0) {
      throw SingularSystemError("counterexample ERM: singular normal matrix");
    }
    return sum_ac / sum_aa;
  }

  double std_err(double w_hat) const {
    const double t = double(count);
    const double hessian = sum_aa / t;
    const double grad_sq =
        (w_hat * w_hat * sum_aa2 - 2.0 * w_hat * sum_aaac + sum_ac2) / t;
    return std::sqrt(std::max(0.0, grad_sq / (hessian * hessian * t)));
  }
};

}  // namespace

CounterexampleMinimizers counterexample_minimizers_exact(int n, double lambda) {
  require_counterexample_n(n);
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw std::invalid_argument("counterexample_minimizers_exact: lambda <= 0");
  }

  double e_s_inv2 = 0.0;   // E[s / (s + l)^2]
  double e_xy_inv2 = 0.0;  // E[(1/n) sum xy / (s + l)^2]
  double e_inv2 = 0.0;     // E[1 / (s + l)^2]

  double binom = 1.0;  // C(n, k), exact in double for n <= 30
  const double two_pow_n = std::ldexp(1.0, n);
  for (int k = 0; k <= n; ++k) {
    const double prob = binom / two_pow_n;
    const double s = double(n + 8 * k) / double(n);
    const double mean_xy = 3.0 * double(n - 2 * k) / double(n);
    const double inv2 = 1.0 / ((s + lambda) * (s + lambda));
    e_s_inv2 += prob * s * inv2;
    e_xy_inv2 += prob * mean_xy * inv2;
    e_inv2 += prob * inv2;
    binom = binom * double(n - k) / double(k + 1);
  }

  CounterexampleMinimizers out;
  out.w_trtr_star = e_xy_inv2 / e_s_inv2;
  out.w_test_star = -e_xy_inv2 / (lambda * e_inv2);
  out.gap = std::abs(out.w_trtr_star - out.w_test_star);
  out.e_s_resolvent_sq = e_s_inv2;
  out.e_xy_resolvent_sq = e_xy_inv2;
  out.e_resolvent_sq = e_inv2;
  return out;
}

Claim1Moments claim1_moments(const Matrix& A, long samples, const Rng& rng) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("claim1_moments: A must be square");
  }
  const double scale = std::max(1e-300, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("claim1_moments: A must be symmetric");
  }
  if (samples < 10000) {
    throw std::invalid_argument("claim1_moments: samples must be >= 10^4");
  }

  const Index d = A.rows();
  double sum_same = 0.0, sumsq_same = 0.0;
  double sum_cross = 0.0, sumsq_cross = 0.0;
  for (long i = 0; i < samples; ++i) {
    Rng local = rng.derive(std::uint64_t(i));
    const Vector v = gaussian_vector(local, d);
    const Vector u = gaussian_vector(local, d);
    const Vector av = A * v;
    const double same = v.dot(av);
    const double cross = u.dot(av);
    sum_same += same * same;
    sumsq_same += same * same * same * same;
    sum_cross += cross * cross;
    sumsq_cross += cross * cross * cross * cross;
  }
  const double t = double(samples);
  Claim1Moments out;
  out.mean_sq_same = sum_same / t;
  out.mean_sq_cross = sum_cross / t;
  out.std_err_same = std::sqrt(
      std::max(0.0, (sumsq_same / t - out.mean_sq_same * out.mean_sq_same) / t));
  out.std_err_cross = std::sqrt(std::max(
      0.0, (sumsq_cross / t - out.mean_sq_cross * out.mean_sq_cross) / t));
  return out;
}

CounterexampleErm counterexample_erm_gap(int n, double lambda, long T,
                                         const Rng& rng) {
  require_counterexample_n(n);
  if (T < 100) {
    throw std::invalid_argument("counterexample_erm_gap: T must be >= 100");
  }
  const CounterexampleModel model(n);
  const RidgeConfig cfg(lambda);

  ScalarErmAccumulator acc;
  for (long t = 0; t < T; ++t) {
    const TaskSample task =
        sample_counterexample_task(model, rng, std::uint64_t(t));
    acc.add(assemble_nonsplit_quadratic(task, cfg));
  }

  const CounterexampleMinimizers exact =
      counterexample_minimizers_exact(n, lambda);
  CounterexampleErm out;
  out.w_hat = acc.solve();
  out.w_std_err = acc.std_err(out.w_hat);
  out.target = exact.w_trtr_star;
  out.gap_to_test_star = std::abs(out.w_hat - exact.w_test_star);
  return out;
}

CounterexampleErm counterexample_split_erm_gap(int n, int n1, double lambda,
                                               long T, const Rng& rng) {
  require_counterexample_n(n);
  if (n1 < 1 || n1 >= n) {
    throw std::invalid_argument(
        "counterexample_split_erm_gap: need 1 <= n1 < n");
  }
  if (T < 100) {
    throw std::invalid_argument("counterexample_split_erm_gap: T >= 100");
  }
  const CounterexampleModel model(n);
  const RidgeConfig cfg(lambda);
  const SplitConfig split(n1, n - n1);

  ScalarErmAccumulator acc;
  for (long t = 0; t < T; ++t) {
    const TaskSample task =
        sample_counterexample_task(model, rng, std::uint64_t(t));
    acc.add(assemble_split_quadratic(task, split, cfg));
  }

  // The split ERM is consistent for the test-time minimizer at its own
  // inner sample count n1.
  const CounterexampleMinimizers exact =
      counterexample_minimizers_exact(n1, lambda);
  CounterexampleErm out;
  out.w_hat = acc.solve();
  out.w_std_err = acc.std_err(out.w_hat);
  out.target = exact.w_test_star;
  out.gap_to_test_star = std::abs(out.w_hat - exact.w_test_star);
  return out;
}

}  // namespace clab
