#pragma once

#include <cstdint>

#include "clab/linalg.hpp"
#include "clab/rng.hpp"

namespace clab {

// Population minimizers of the two-point counterexample distribution in
// d = 1: the in-sample (train-train) target and the test-time target for a
// given inner sample count, and their separation.
struct CounterexampleMinimizers {
  double w_trtr_star = 0.0;
  double w_test_star = 0.0;
  double gap = 0.0;
  // The three enumeration sums the minimizers are built from:
  // E[s/(s+l)^2], E[(1/n) sum xy / (s+l)^2], E[1/(s+l)^2].
  double e_s_resolvent_sq = 0.0;
  double e_xy_resolvent_sq = 0.0;
  double e_resolvent_sq = 0.0;
};

// Exact minimizers by enumeration over the Binomial(n, 1/2) count k of
// (3, -1) rows: s(k) = (n + 8k) / n, sum xy = 3 (n - 2k), and
//   w_trtr = E[s/(s+l)^2]^-1 E[(1/n) sum xy / (s+l)^2]
//   w_test = -(l E[1/(s+l)^2])^-1 E[(1/n) sum xy / (s+l)^2].
// Requires 1 <= n <= 30 (binomial weights stay exact in double) and l > 0.
CounterexampleMinimizers counterexample_minimizers_exact(int n, double lambda);

// Monte-Carlo estimates of E[(v^T A v)^2] and E[(v^T A u)^2] for independent
// standard Gaussian v, u; used to check the closed forms
// 2 ||A||_F^2 + tr(A)^2 and ||A||_F^2.
struct Claim1Moments {
  double mean_sq_same = 0.0;
  double std_err_same = 0.0;
  double mean_sq_cross = 0.0;
  double std_err_cross = 0.0;
};

Claim1Moments claim1_moments(const Matrix& A, long samples, const Rng& rng);

// Result of running an ERM on counterexample tasks against the exact
// oracle targets.
struct CounterexampleErm {
  double w_hat = 0.0;
  double w_std_err = 0.0;      // sandwich-based standard error of w_hat
  double target = 0.0;          // the exact population target of this ERM
  double gap_to_test_star = 0.0;  // |w_hat - w_test_star| at the inner count
};

// Non-split ERM over T counterexample tasks (modules tasks + solvers);
// returns the estimate and its distance to the exact test-time minimizer
// w_test_star(lambda, n). `target` is w_trtr_star(lambda, n), the point the
// estimate actually converges to.
CounterexampleErm counterexample_erm_gap(int n, double lambda, long T,
                                         const Rng& rng);

// Split ERM with split (n1, n - n1) on the same task stream. Its
// population target is the test-time minimizer for inner count n1,
// w_test_star(lambda, n1); `gap_to_test_star` is measured against that.
// Requires 1 <= n1 < n <= 30.
CounterexampleErm counterexample_split_erm_gap(int n, int n1, double lambda,
                                               long T, const Rng& rng);

}  // namespace clab
