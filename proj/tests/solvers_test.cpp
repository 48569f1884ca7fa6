#include <doctest.h>

#include <cmath>
#include <vector>

#include "clab/solvers.hpp"
#include "clab/tasks.hpp"
#include "test_support.hpp"

using namespace clab;

namespace {

TaskSample random_task(Index n, Index d, std::uint64_t key) {
  const RealizableModel model = RealizableModel::isotropic(d, n, 1.0);
  return sample_realizable_task(model, Rng(77, 0), key);
}

Vector random_w(Index d, std::uint64_t key) {
  Rng rng(555, key);
  return gaussian_vector(rng, d);
}

}  // namespace

TEST_CASE("ridge_solve returns w0 on zero residual and empty data") {
  const TaskSample task = random_task(6, 4, 1);
  const Vector w0 = *task.w_true;  // y = X w0 exactly
  for (const double lambda : {0.0, 0.3, 7.0}) {
    const Vector w = ridge_solve(w0, task.X, task.y, RidgeConfig(lambda));
    CHECK((w - w0).norm() <= 1e-12 * w0.norm());
  }

  const Matrix empty(0, 4);
  const Vector empty_y(0);
  const Vector w0b = random_w(4, 2);
  CHECK((ridge_solve(w0b, empty, empty_y, RidgeConfig(1.0)) - w0b).norm() ==
        0.0);
}

TEST_CASE("ridge_solve reduces to the identity map at huge lambda") {
  const TaskSample task = random_task(10, 6, 3);
  const Vector w0 = random_w(6, 4);
  const Vector w = ridge_solve(w0, task.X, task.y, RidgeConfig(1e12));
  CHECK((w - w0).norm() <= 1e-6 * w0.norm());
}

TEST_CASE("ridge_solve matches the gradient-descent oracle") {
  // d = 3, n = 5, lambda = 0.7 against 1e5 plain gradient steps.
  const TaskSample task = random_task(5, 3, 5);
  const Vector w0 = random_w(3, 6);
  const Vector direct = ridge_solve(w0, task.X, task.y, RidgeConfig(0.7));
  const Vector gd =
      testing::ridge_gradient_descent(w0, task.X, task.y, 0.7, 100000);
  CHECK((direct - gd).norm() <= 1e-6 * std::max(1.0, gd.norm()));
}

TEST_CASE("ridge_solve lambda = 0 is the minimum-distance interpolator") {
  const TaskSample task = random_task(4, 9, 7);  // n < d: interpolation exists
  const Vector w0 = random_w(9, 8);
  const Vector w = ridge_solve(w0, task.X, task.y, RidgeConfig(0.0));
  CHECK((task.X * w - task.y).norm() <= 1e-8);
  // Gradient descent from w0 on the unregularized objective converges to
  // the same interpolator.
  const Vector gd =
      testing::ridge_gradient_descent(w0, task.X, task.y, 0.0, 200000);
  CHECK((w - gd).norm() <= 1e-5 * std::max(1.0, w.norm()));
}

TEST_CASE("ridge_solve dual and primal paths agree") {
  const TaskSample task = random_task(5, 12, 9);  // exercises the dual branch
  const Vector w0 = random_w(12, 10);
  const double lambda = 0.4;
  const Vector dual = ridge_solve(w0, task.X, task.y, RidgeConfig(lambda));
  // Direct primal evaluation with a generic dense solver.
  const Matrix gram = task.X.transpose() * task.X +
                      double(task.X.rows()) * lambda *
                          Matrix::Identity(12, 12);
  const Vector primal =
      w0 + gram.ldlt().solve(task.X.transpose() * (task.y - task.X * w0));
  CHECK((dual - primal).norm() <= 1e-9 * std::max(1.0, primal.norm()));
}

TEST_CASE("ridge_solve shape validation") {
  const TaskSample task = random_task(5, 3, 11);
  CHECK_THROWS_AS(
      ridge_solve(Vector::Zero(4), task.X, task.y, RidgeConfig(1.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ridge_solve(Vector::Zero(3), task.X, Vector::Zero(4), RidgeConfig(1.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(RidgeConfig(-1.0), std::invalid_argument);
}

TEST_CASE("split_loss special cases") {
  const TaskSample task = random_task(12, 7, 13);

  // w0 = w_true zeroes the loss for any lambda: the inner solver returns
  // w_true, which interpolates the validation rows as well.
  for (const double lambda : {0.0, 0.5, 50.0}) {
    const double loss =
        split_loss(*task.w_true, task, SplitConfig(8, 4), RidgeConfig(lambda));
    CHECK(loss <= 1e-18);
  }

  // Empty train split: the loss is the plain average squared residual.
  const Vector w0 = random_w(7, 14);
  const double loss0 =
      split_loss(w0, task, SplitConfig(0, 12), RidgeConfig(2.0));
  const double direct =
      (task.y - task.X * w0).squaredNorm() / (2.0 * 12.0);
  CHECK(loss0 == doctest::Approx(direct).epsilon(1e-12));

  CHECK_THROWS_AS(split_loss(w0, task, SplitConfig(0, 12), RidgeConfig(0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(split_loss(w0, task, SplitConfig(4, 4), RidgeConfig(1.0)),
                  std::invalid_argument);
}

TEST_CASE("nonsplit_loss hand example and errors") {
  TaskSample tiny;
  tiny.X = Matrix::Ones(1, 1);
  tiny.y = Vector::Ones(1);
  const Vector zero = Vector::Zero(1);
  // Inner solution (1 + 1)^-1 * 1 = 1/2, loss = (1/2)(1 - 1/2)^2 = 1/8.
  CHECK(nonsplit_loss(zero, tiny, RidgeConfig(1.0)) ==
        doctest::Approx(0.125).epsilon(1e-12));

  const TaskSample task = random_task(9, 5, 15);
  CHECK(nonsplit_loss(*task.w_true, task, RidgeConfig(0.8)) <= 1e-18);
  CHECK_THROWS_AS(nonsplit_loss(zero, tiny, RidgeConfig(0.0)),
                  std::invalid_argument);
}

TEST_CASE("quadratic forms reproduce the direct losses") {
  // Fidelity invariant on both branches (n1 < d, n1 >= d; n < d, n >= d).
  const struct {
    Index n, d, n1;
    double lambda;
  } cases[] = {
      {12, 7, 8, 0.5},
      {10, 25, 6, 1.5},
      {6, 3, 4, 3.0},
      {8, 8, 0, 2.0},
  };
  for (const auto& tc : cases) {
    const TaskSample task =
        random_task(tc.n, tc.d, std::uint64_t(tc.n * 31 + tc.d));
    const SplitConfig split(tc.n1, tc.n - tc.n1);
    const RidgeConfig cfg(tc.lambda);
    const QuadraticForm sp = assemble_split_quadratic(task, split, cfg);
    const QuadraticForm ns = assemble_nonsplit_quadratic(task, cfg);
    for (int k = 0; k < 20; ++k) {
      const Vector w0 = random_w(tc.d, std::uint64_t(1000 + k));
      const double direct_sp = split_loss(w0, task, split, cfg);
      const double direct_ns = nonsplit_loss(w0, task, cfg);
      CHECK(std::abs(direct_sp - sp.loss_at(w0)) <=
            1e-10 * (1.0 + direct_sp));
      CHECK(std::abs(direct_ns - ns.loss_at(w0)) <=
            1e-10 * (1.0 + direct_ns));
    }
  }
}

TEST_CASE("assemble_split_quadratic limits") {
  const TaskSample task = random_task(10, 6, 17);

  const QuadraticForm empty_train =
      assemble_split_quadratic(task, SplitConfig(0, 10), RidgeConfig(1.0));
  const double root = std::sqrt(10.0);
  CHECK((empty_train.A - task.X / root).norm() == 0.0);
  CHECK((empty_train.c - task.y / root).norm() == 0.0);

  // Resolvent limit: lambda -> infinity recovers the empty-train form.
  const QuadraticForm huge =
      assemble_split_quadratic(task, SplitConfig(6, 4), RidgeConfig(1e12));
  const auto [train, val] = split_task(task, SplitConfig(6, 4));
  (void)train;
  CHECK((huge.A - val.X / 2.0).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((huge.c - val.y / 2.0).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("assemble_nonsplit_quadratic is minimized at w_true") {
  for (const auto& [n, d] : {std::pair<Index, Index>{12, 5}, {5, 12}}) {
    const TaskSample task = random_task(n, d, std::uint64_t(19 + n));
    const QuadraticForm form =
        assemble_nonsplit_quadratic(task, RidgeConfig(0.7));
    CHECK((form.A * *task.w_true - form.c).norm() <=
          1e-10 * (1.0 + form.c.norm()));
    CHECK(form.loss_at(*task.w_true) <= 1e-18);
  }

  TaskSample tiny;
  tiny.X = Matrix::Ones(1, 1);
  tiny.y = Vector::Ones(1);
  const QuadraticForm form = assemble_nonsplit_quadratic(tiny, RidgeConfig(1.0));
  CHECK(form.loss_at(Vector::Zero(1)) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
  const TaskSample task = random_task(9, 6, 23);
  const SplitConfig split(5, 4);
  const RidgeConfig cfg(0.9);
  const QuadraticForm sp = assemble_split_quadratic(task, split, cfg);
  const QuadraticForm ns = assemble_nonsplit_quadratic(task, cfg);
  const Vector w0 = random_w(6, 24);

  const double step = 1e-5;
  for (const auto* form : {&sp, &ns}) {
    const bool is_split = form == &sp;
    const Vector grad = form->grad_at(w0);
    Vector fd(6);
    for (Index i = 0; i < 6; ++i) {
      Vector lo = w0, hi = w0;
      lo(i) -= step;
      hi(i) += step;
      const double f_lo = is_split ? split_loss(lo, task, split, cfg)
                                   : nonsplit_loss(lo, task, cfg);
      const double f_hi = is_split ? split_loss(hi, task, split, cfg)
                                   : nonsplit_loss(hi, task, cfg);
      fd(i) = (f_hi - f_lo) / (2.0 * step);
    }
    CHECK((grad - fd).norm() <= 1e-6 * std::max(1.0, grad.norm()));
  }
}

TEST_CASE("split loss is continuous in lambda at zero") {
  // n1 <= d so the interpolator exists; lambda = 1e-8 must match the
  // min-norm evaluation to 1e-4 relative.
  const TaskSample task = random_task(10, 8, 29);
  const SplitConfig split(6, 4);
  const Vector w0 = random_w(8, 30);
  const double near_zero = split_loss(w0, task, split, RidgeConfig(1e-8));
  const double at_zero = split_loss(w0, task, split, RidgeConfig(0.0));
  CHECK(std::abs(near_zero - at_zero) <= 1e-4 * std::max(1e-12, at_zero));
}

TEST_CASE("accumulator merging is commutative and associative") {
  const RidgeConfig cfg(1.1);
  const Index d = 5;
  std::vector<QuadraticForm> forms;
  for (int t = 0; t < 9; ++t) {
    forms.push_back(
        assemble_nonsplit_quadratic(random_task(7, d, 100 + t), cfg));
  }

  QuadraticAccumulator ab(d), ba(d), a(d), b(d);
  for (int t = 0; t < 4; ++t) a.add(forms[t]);
  for (int t = 4; t < 9; ++t) b.add(forms[t]);
  ab.merge(a);
  ab.merge(b);
  ba.merge(b);
  ba.merge(a);
  CHECK((ab.hessian_sum().array() == ba.hessian_sum().array()).all());
  CHECK((ab.moment_sum().array() == ba.moment_sum().array()).all());
  CHECK(ab.count() == 9);

  // Sequential add equals merged blocks up to floating-point reassociation.
  QuadraticAccumulator seq(d);
  for (const auto& form : forms) seq.add(form);
  CHECK((seq.hessian_sum() - ab.hessian_sum()).cwiseAbs().maxCoeff() <=
        1e-12 * ab.hessian_sum().cwiseAbs().maxCoeff());

  // Symmetry is maintained exactly by construction.
  CHECK((seq.hessian_sum() - seq.hessian_sum().transpose())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("erm_solve on a single identity form and against conjugate gradient") {
  QuadraticForm identity;
  identity.A = Matrix::Identity(3, 3);
  identity.c = (Vector(3) << 2.0, -1.0, 0.25).finished();
  QuadraticAccumulator acc(3);
  acc.add(identity);
  CHECK((erm_solve(acc) - identity.c).norm() <= 1e-12);

  const RidgeConfig cfg(0.8);
  const Index d = 12;
  QuadraticAccumulator many(d);
  for (int t = 0; t < 40; ++t) {
    many.add(assemble_nonsplit_quadratic(random_task(6, d, 200 + t), cfg));
  }
  const Vector w = erm_solve(many);
  const Vector cg =
      testing::conjugate_gradient(many.hessian_sum(), many.moment_sum());
  CHECK((w - cg).norm() <= 1e-8 * std::max(1.0, cg.norm()));

  // ERM optimality: the accumulated gradient vanishes at the solution.
  const Vector residual = many.hessian_sum() * w - many.moment_sum();
  CHECK(residual.norm() <= 1e-8 * many.moment_sum().norm());
}

TEST_CASE("erm_solve reports singular systems") {
  QuadraticAccumulator acc(4);
  QuadraticForm thin;
  thin.A = Matrix::Zero(1, 4);
  thin.A(0, 0) = 1.0;
  thin.c = Vector::Ones(1);
  acc.add(thin);  // rank 1 < 4
  CHECK_THROWS_AS(erm_solve(acc), SingularSystemError);

  QuadraticAccumulator empty(4);
  CHECK_THROWS_AS(erm_solve(empty), SingularSystemError);
}

TEST_CASE("sandwich covariance: zero-gradient and scalar cases") {
  QuadraticForm form;
  form.A = Matrix::Identity(2, 2);
  const Vector w_hat = (Vector(2) << 1.0, -2.0).finished();
  form.c = form.A * w_hat;
  std::vector<QuadraticForm> forms(5, form);
  const Matrix cov = sandwich_covariance(forms, w_hat);
  CHECK(cov.cwiseAbs().maxCoeff() <= 1e-15);

  // d = 1, A = 1, c ~ N(0,1), w_hat = 0: the sandwich collapses to the
  // sample second moment of c.
  Rng rng(404, 0);
  const long t_count = 20000;
  std::vector<QuadraticForm> scalar(t_count);
  double sum_sq = 0.0;
  for (long t = 0; t < t_count; ++t) {
    Rng local = rng.derive(t);
    scalar[t].A = Matrix::Ones(1, 1);
    scalar[t].c = Vector::Constant(1, local.next_gaussian());
    sum_sq += scalar[t].c(0) * scalar[t].c(0);
  }
  const Matrix var = sandwich_covariance(scalar, Vector::Zero(1));
  CHECK(var(0, 0) == doctest::Approx(sum_sq / double(t_count)).epsilon(1e-12));
  CHECK(var(0, 0) ==
        doctest::Approx(1.0).epsilon(3.0 * std::sqrt(2.0 / double(t_count))));

  CHECK_THROWS_AS(sandwich_covariance({}, Vector::Zero(1)),
                  std::invalid_argument);
}

TEST_CASE("sandwich trace predicts the replicate MSE of the split ERM") {
  const Index d = 8, n = 6, n1 = 3;
  const long tasks = 400;
  const int replicates = 300;
  const RealizableModel model = RealizableModel::isotropic(d, n, 1.0);
  const SplitConfig split(n1, n - n1);
  const RidgeConfig cfg(2.0);
  const Rng root(2023, 0);

  double mse = 0.0;
  double mean_trace = 0.0;
  for (int rep = 0; rep < replicates; ++rep) {
    const Rng rng = root.derive(rep);
    QuadraticAccumulator acc(d);
    std::vector<QuadraticForm> forms;
    forms.reserve(tasks);
    for (long t = 0; t < tasks; ++t) {
      forms.push_back(assemble_split_quadratic(
          sample_realizable_task(model, rng, std::uint64_t(t)), split, cfg));
      acc.add(forms.back());
    }
    const Vector w_hat = erm_solve(acc);
    mse += (w_hat - model.centroid).squaredNorm();
    mean_trace += sandwich_covariance(forms, w_hat).trace() / double(tasks);
  }
  mse /= replicates;
  mean_trace /= replicates;
  CHECK(mse == doctest::Approx(mean_trace).epsilon(0.20));
}

TEST_CASE("both ERMs concentrate on the centroid as T grows") {
  // Error at T = 4000 should sit well below the value at T = 250
  // (factor >= 8 on replicate averages; the mean scales like 1/T).
  const Index d = 16, n = 8, n1 = 4;
  const RealizableModel model = RealizableModel::isotropic(d, n, 1.0);
  const RidgeConfig cfg_trtr(0.6);
  const RidgeConfig cfg_sp(1e4);
  const SplitConfig split(n1, n - n1);
  const Rng root(31007, 0);
  const int replicates = 30;

  double err_small_trtr = 0.0, err_big_trtr = 0.0;
  double err_small_sp = 0.0, err_big_sp = 0.0;
  for (int rep = 0; rep < replicates; ++rep) {
    for (const long tasks : {250L, 4000L}) {
      const Rng rng = root.derive(rep * 2 + (tasks == 4000L));
      QuadraticAccumulator acc_trtr(d), acc_sp(d);
      for (long t = 0; t < tasks; ++t) {
        const TaskSample task =
            sample_realizable_task(model, rng, std::uint64_t(t));
        acc_trtr.add(assemble_nonsplit_quadratic(task, cfg_trtr));
        acc_sp.add(assemble_split_quadratic(task, split, cfg_sp));
      }
      const double e_trtr =
          (erm_solve(acc_trtr) - model.centroid).squaredNorm();
      const double e_sp = (erm_solve(acc_sp) - model.centroid).squaredNorm();
      if (tasks == 250L) {
        err_small_trtr += e_trtr;
        err_small_sp += e_sp;
      } else {
        err_big_trtr += e_trtr;
        err_big_sp += e_sp;
      }
    }
  }
  CHECK(err_small_trtr / err_big_trtr >= 8.0);
  CHECK(err_small_sp / err_big_sp >= 8.0);
}
