#pragma once

#include <vector>

#include "clab/linalg.hpp"
#include "clab/rng.hpp"

namespace clab {

enum class RateMethod { closed_form, monte_carlo };

// Provenance of a rate value: the problem sizes it was computed for.
// Fields that do not apply stay at their defaults.
struct RateMeta {
  Index d = 0;
  Index n = 0;
  Index n1 = -1;
  Index n2 = -1;
  double lambda = 0.0;
  double gamma = 0.0;
  double r_sq = 1.0;
};

// A scalar asymptotic rate with its standard error. stderr is zero exactly
// for closed forms.
struct RateEstimate {
  double value = 0.0;
  double std_err = 0.0;
  RateMethod method = RateMethod::closed_form;
  RateMeta meta;
};

// A point (lambda, gamma) in the proportional limit d/n -> gamma.
struct ShapePoint {
  double lambda = 1.0;
  double gamma = 1.0;

  ShapePoint(double lambda_, double gamma_);
};

// Spectra of (1/n) X^T X for i.i.d. standard Gaussian X in R^{n x d}:
// `samples` independent draws, each a descending eigenvalue vector of
// length d. Sampling parallelizes over the sample index with derived
// streams; results are identical for every thread count.
std::vector<Vector> wishart_spectra(Index d, Index n, int samples,
                                    const Rng& rng, int threads = 1);

// Default Monte-Carlo budget for spectrum sampling at dimension d.
int default_spectrum_samples(Index d);

// Rate of the non-split method at finite (n, d):
//   AsymMSE = d R^2 * E[sum_i s_i^2/(s_i+l)^4] / (E[sum_i s_i/(s_i+l)^2])^2,
// estimated as a ratio of Monte-Carlo means over Wishart spectra, with the
// standard error from the bivariate delta method over >= 30 sample batches.
RateEstimate rho_trtr_mc(Index d, Index n, double lambda, int samples,
                         const Rng& rng, double r_sq = 1.0, int threads = 1);

// Same estimate evaluated on pre-drawn spectra (shared across lambdas).
RateEstimate rho_trtr_from_spectra(const std::vector<Vector>& spectra, Index d,
                                   Index n, double lambda, double r_sq = 1.0);

// Rate of the split method at finite (n1, n2, d), spectra from the
// n1-sample Gram matrix:
//   AsymMSE = (d R^2 / n2) * [ (E sum_i l^2/(s_i+l)^2)^2
//                              + (n2+1) E sum_i l^4/(s_i+l)^4 ]
//             / (E sum_i l^2/(s_i+l)^2)^2.
// n1 == 0 is deterministic (all s_i = 0) and short-circuits to the exact
// value (d + n2 + 1) R^2 / n2 with zero standard error.
RateEstimate rho_sp_mc(Index d, Index n1, Index n2, double lambda, int samples,
                       const Rng& rng, double r_sq = 1.0, int threads = 1);

RateEstimate rho_sp_from_spectra(const std::vector<Vector>& spectra, Index d,
                                 Index n1, Index n2, double lambda,
                                 double r_sq = 1.0);

// Optimal split-method rate over lambda at finite (d, n2):
//   (d + n2 + 1) R^2 / n2, attained in the lambda -> infinity limit.
RateEstimate sp_optimal_rate(Index d, Index n2, double r_sq = 1.0);

// Two-parameter Stieltjes transform of the Marchenko-Pastur law:
//   s(l1, l2) = (g - 1 - l1/l2 + sqrt((l1/l2 + 1 + g)^2 - 4g)) / (2 g l1).
double stieltjes_mp(double lambda1, double lambda2, double gamma);

// Analytic -d s / d lambda2; at lambda2 = 1 this is the proportional limit
// of (1/d) E tr((S + lambda1 I)^-2 S).
double stieltjes_mp_neg_dlambda2(double lambda1, double lambda2, double gamma);

// Proportional limits obtained by differentiating the Stieltjes transform:
//   mp_trace_r2s1 = lim (1/d) E tr((S + l I)^-2 S)
//   mp_trace_r4s2 = lim (1/d) E tr((S + l I)^-4 S^2).
double mp_trace_r2s1(double lambda, double gamma);
double mp_trace_r4s2(double lambda, double gamma);

// Non-split rate in the proportional limit (R^2 = 1 normalization):
//   rho = 4 g^2 [(g-1)^2 + (g+1) l]
//         / (l + 1 + g - sqrt((l+g+1)^2 - 4g))^2 / ((l+g+1)^2 - 4g)^{3/2}.
// Equals mp_trace_r4s2 / mp_trace_r2s1^2.
double rho_limit(const ShapePoint& point);

struct OptimizeResult {
  double lambda_star = 0.0;
  double value = 0.0;
};

// Minimizes rho_limit over lambda in [1e-4, 1e4] by a coarse log-grid scan
// followed by golden-section on log(lambda) to relative tolerance tol.
// Verifies that both bracket endpoints exceed the interior minimum.
OptimizeResult optimize_rho(double gamma, double tol = 1e-10);

// Closed-form upper bound on the tuned non-split rate:
//   max{1 + 5 g / 27, 5/27 + g}; tight at gamma = 1.
double rho_upper_bound(double gamma);

// Tuned split-method rate in the proportional limit: 1 + gamma
// (R^2 = 1 normalization).
double sp_limit_rate(double gamma);

}  // namespace clab
