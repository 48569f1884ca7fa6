#include "clab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "clab/parallel.hpp"

namespace clab {

namespace {

void require_positive(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::invalid_argument(std::string(what) + " must be finite and > 0");
  }
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / double(xs.size());
}

// Standard error of f(mean(a), mean(b)) by the bivariate delta method over
// contiguous sample batches (30 when enough samples are available).
double delta_std_err(const std::vector<double>& a, const std::vector<double>& b,
                     double grad_a, double grad_b) {
  const long n = long(a.size());
  const long batches = std::min<long>(n, 30);
  if (batches < 2) return 0.0;

  std::vector<double> ma(batches), mb(batches);
  for (long j = 0; j < batches; ++j) {
    const long lo = j * n / batches;
    const long hi = (j + 1) * n / batches;
    double sa = 0.0, sb = 0.0;
    for (long i = lo; i < hi; ++i) {
      sa += a[i];
      sb += b[i];
    }
    ma[j] = sa / double(hi - lo);
    mb[j] = sb / double(hi - lo);
  }
  const double ca = mean_of(ma);
  const double cb = mean_of(mb);
  double saa = 0.0, sab = 0.0, sbb = 0.0;
  for (long j = 0; j < batches; ++j) {
    saa += (ma[j] - ca) * (ma[j] - ca);
    sab += (ma[j] - ca) * (mb[j] - cb);
    sbb += (mb[j] - cb) * (mb[j] - cb);
  }
  const double denom = double(batches - 1) * double(batches);
  const double var = (grad_a * grad_a * saa + 2.0 * grad_a * grad_b * sab +
                      grad_b * grad_b * sbb) /
                     denom;
  return std::sqrt(std::max(0.0, var));
}

}  // namespace

ShapePoint::ShapePoint(double lambda_, double gamma_)
    : lambda(lambda_), gamma(gamma_) {
  require_positive(lambda, "ShapePoint lambda");
  require_positive(gamma, "ShapePoint gamma");
}

int default_spectrum_samples(Index d) {
  if (d <= 100) return 2000;
  if (d <= 1000) return 200;
  return 100;
}

std::vector<Vector> wishart_spectra(Index d, Index n, int samples,
                                    const Rng& rng, int threads) {
  if (d < 1 || n < 1) {
    throw std::invalid_argument("wishart_spectra: d and n must be >= 1");
  }
  if (samples < 1) {
    throw std::invalid_argument("wishart_spectra: samples must be >= 1");
  }
  std::vector<Vector> spectra(samples);
  parallel_for(samples, threads, [&](long i) {
    Rng local = rng.derive(std::uint64_t(i));
    const Matrix x = gaussian_matrix(local, n, d);
    spectra[i] = gram_eigvals(x);
  });
  return spectra;
}

RateEstimate rho_trtr_from_spectra(const std::vector<Vector>& spectra, Index d,
                                   Index n, double lambda, double r_sq) {
  require_positive(lambda, "rho_trtr lambda");
  if (spectra.size() < 2) {
    throw std::invalid_argument("rho_trtr: need at least 2 spectra");
  }
  const long s = long(spectra.size());
  std::vector<double> num(s), den(s);
  for (long i = 0; i < s; ++i) {
    const Vector& sig = spectra[i];
    double ni = 0.0, di = 0.0;
    for (Index k = 0; k < sig.size(); ++k) {
      const double shifted = sig(k) + lambda;
      const double inv_sq = 1.0 / (shifted * shifted);
      ni += sig(k) * sig(k) * inv_sq * inv_sq;
      di += sig(k) * inv_sq;
    }
    num[i] = ni;
    den[i] = di;
  }
  const double mean_num = mean_of(num);
  const double mean_den = mean_of(den);
  const double scale = double(d) * r_sq;
  const double value = scale * mean_num / (mean_den * mean_den);

  const double grad_num = scale / (mean_den * mean_den);
  const double grad_den =
      -2.0 * scale * mean_num / (mean_den * mean_den * mean_den);

  RateEstimate est;
  est.value = value;
  est.std_err = delta_std_err(num, den, grad_num, grad_den);
  est.method = RateMethod::monte_carlo;
  est.meta = RateMeta{d, n, -1, -1, lambda, double(d) / double(n), r_sq};
  return est;
}

RateEstimate rho_trtr_mc(Index d, Index n, double lambda, int samples,
                         const Rng& rng, double r_sq, int threads) {
  if (samples < 2) {
    throw std::invalid_argument("rho_trtr_mc: samples must be >= 2");
  }
  return rho_trtr_from_spectra(wishart_spectra(d, n, samples, rng, threads), d,
                               n, lambda, r_sq);
}

RateEstimate rho_sp_from_spectra(const std::vector<Vector>& spectra, Index d,
                                 Index n1, Index n2, double lambda,
                                 double r_sq) {
  require_positive(lambda, "rho_sp lambda");
  if (n2 < 1) {
    throw std::invalid_argument("rho_sp: n2 must be >= 1");
  }
  if (spectra.size() < 2) {
    throw std::invalid_argument("rho_sp: need at least 2 spectra");
  }
  const long s = long(spectra.size());
  // den_i = sum_k l^2/(s_k+l)^2, quart_i = sum_k l^4/(s_k+l)^4.
  std::vector<double> den(s), quart(s);
  for (long i = 0; i < s; ++i) {
    const Vector& sig = spectra[i];
    double di = 0.0, qi = 0.0;
    for (Index k = 0; k < sig.size(); ++k) {
      const double ratio = lambda / (sig(k) + lambda);
      const double r2 = ratio * ratio;
      di += r2;
      qi += r2 * r2;
    }
    den[i] = di;
    quart[i] = qi;
  }
  const double mean_den = mean_of(den);
  const double mean_quart = mean_of(quart);
  const double scale = double(d) * r_sq / double(n2);
  const double value =
      scale * (1.0 + double(n2 + 1) * mean_quart / (mean_den * mean_den));

  const double grad_quart = scale * double(n2 + 1) / (mean_den * mean_den);
  const double grad_den = -2.0 * scale * double(n2 + 1) * mean_quart /
                          (mean_den * mean_den * mean_den);

  RateEstimate est;
  est.value = value;
  est.std_err = delta_std_err(quart, den, grad_quart, grad_den);
  est.method = RateMethod::monte_carlo;
  est.meta =
      RateMeta{d, n1 + n2, n1, n2, lambda, double(d) / double(n1 + n2), r_sq};
  return est;
}

RateEstimate rho_sp_mc(Index d, Index n1, Index n2, double lambda, int samples,
                       const Rng& rng, double r_sq, int threads) {
  require_positive(lambda, "rho_sp_mc lambda");
  if (n1 < 0 || n2 < 1 || d < 1) {
    throw std::invalid_argument("rho_sp_mc: need d >= 1, n1 >= 0, n2 >= 1");
  }
  if (n1 == 0) {
    // Empty train split: every eigenvalue is zero and the rate is exact.
    RateEstimate est = sp_optimal_rate(d, n2, r_sq);
    est.meta.n1 = 0;
    est.meta.n = n2;
    est.meta.lambda = lambda;
    est.meta.gamma = double(d) / double(n2);
    return est;
  }
  if (samples < 2) {
    throw std::invalid_argument("rho_sp_mc: samples must be >= 2");
  }
  return rho_sp_from_spectra(wishart_spectra(d, n1, samples, rng, threads), d,
                             n1, n2, lambda, r_sq);
}

RateEstimate sp_optimal_rate(Index d, Index n2, double r_sq) {
  if (d < 1 || n2 < 1) {
    throw std::invalid_argument("sp_optimal_rate: need d >= 1 and n2 >= 1");
  }
  RateEstimate est;
  est.value = double(d + n2 + 1) * r_sq / double(n2);
  est.std_err = 0.0;
  est.method = RateMethod::closed_form;
  est.meta = RateMeta{d, n2, -1, n2, 0.0, double(d) / double(n2), r_sq};
  return est;
}

double stieltjes_mp(double lambda1, double lambda2, double gamma) {
  require_positive(lambda1, "stieltjes_mp lambda1");
  require_positive(lambda2, "stieltjes_mp lambda2");
  require_positive(gamma, "stieltjes_mp gamma");
  const double u = lambda1 / lambda2;
  const double disc = (u + 1.0 + gamma) * (u + 1.0 + gamma) - 4.0 * gamma;
  return (gamma - 1.0 - u + std::sqrt(disc)) / (2.0 * gamma * lambda1);
}

double stieltjes_mp_neg_dlambda2(double lambda1, double lambda2, double gamma) {
  require_positive(lambda1, "stieltjes_mp lambda1");
  require_positive(lambda2, "stieltjes_mp lambda2");
  require_positive(gamma, "stieltjes_mp gamma");
  const double u = lambda1 / lambda2;
  const double a = u + 1.0 + gamma;
  const double disc = a * a - 4.0 * gamma;
  const double root = std::sqrt(disc);
  // (a / root - 1) / (2 g l2^2) in the cancellation-free form
  // (a - root) = 4 g / (a + root).
  return 2.0 / (root * (a + root) * lambda2 * lambda2);
}

double mp_trace_r2s1(double lambda, double gamma) {
  return stieltjes_mp_neg_dlambda2(lambda, 1.0, gamma);
}

double mp_trace_r4s2(double lambda, double gamma) {
  require_positive(lambda, "mp_trace_r4s2 lambda");
  require_positive(gamma, "mp_trace_r4s2 gamma");
  const double a = lambda + 1.0 + gamma;
  const double disc = a * a - 4.0 * gamma;
  if (disc <= 0.0) {
    throw NumericError("mp_trace_r4s2: non-positive square-root argument");
  }
  const double num = (gamma - 1.0) * (gamma - 1.0) + (gamma + 1.0) * lambda;
  return num / (disc * disc * std::sqrt(disc));
}

double rho_limit(const ShapePoint& point) {
  const double lambda = point.lambda;
  const double gamma = point.gamma;
  const double a = lambda + 1.0 + gamma;
  const double disc = a * a - 4.0 * gamma;
  // disc = (l + (sqrt(g)-1)^2)(l + (sqrt(g)+1)^2) > 0 for l, g > 0;
  // guard anyway before taking roots.
  if (disc <= 0.0) {
    throw NumericError("rho_limit: non-positive square-root argument");
  }
  const double root = std::sqrt(disc);
  const double num = (gamma - 1.0) * (gamma - 1.0) + (gamma + 1.0) * lambda;
  // 4 g^2 num / ((a - root)^2 disc^{3/2}) with a - root = 4 g / (a + root).
  const double apr = a + root;
  return num * apr * apr / (4.0 * disc * root);
}

OptimizeResult optimize_rho(double gamma, double tol) {
  require_positive(gamma, "optimize_rho gamma");
  require_positive(tol, "optimize_rho tol");

  const double log_lo = std::log(1e-4);
  const double log_hi = std::log(1e4);
  const auto eval = [&](double log_lambda) {
    return rho_limit(ShapePoint(std::exp(log_lambda), gamma));
  };

  // Coarse scan to bracket the minimum of a unimodal-in-practice objective.
  constexpr int kScan = 257;
  int best = 0;
  double best_val = eval(log_lo);
  for (int i = 1; i < kScan; ++i) {
    const double t = log_lo + (log_hi - log_lo) * double(i) / double(kScan - 1);
    const double v = eval(t);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (log_hi - log_lo) / double(kScan - 1);
  double a = log_lo + step * double(std::max(0, best - 1));
  double b = log_lo + step * double(std::min(kScan - 1, best + 1));

  // Golden-section on log(lambda).
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = eval(x2);
    }
  }
  OptimizeResult result;
  result.lambda_star = std::exp(0.5 * (a + b));
  result.value = rho_limit(ShapePoint(result.lambda_star, gamma));

  if (eval(log_lo) <= result.value || eval(log_hi) <= result.value) {
    throw NumericError("optimize_rho: minimum not interior to [1e-4, 1e4]");
  }
  return result;
}

double rho_upper_bound(double gamma) {
  require_positive(gamma, "rho_upper_bound gamma");
  return std::max(1.0 + 5.0 * gamma / 27.0, 5.0 / 27.0 + gamma);
}

double sp_limit_rate(double gamma) {
  require_positive(gamma, "sp_limit_rate gamma");
  return 1.0 + gamma;
}

}  // namespace clab
