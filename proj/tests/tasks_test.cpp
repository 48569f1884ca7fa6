#include <doctest.h>

#include <cmath>

#include "clab/tasks.hpp"

using namespace clab;

TEST_CASE("realizable tasks are exactly noiseless and deterministic") {
  const RealizableModel model = RealizableModel::isotropic(8, 5, 1.0);
  const Rng rng(3, 0);

  const TaskSample a = sample_realizable_task(model, rng, 12);
  const TaskSample b = sample_realizable_task(model, rng, 12);
  CHECK((a.X.array() == b.X.array()).all());
  CHECK((a.y.array() == b.y.array()).all());
  REQUIRE(a.w_true.has_value());
  CHECK((*a.w_true - *b.w_true).norm() == 0.0);

  // Exact interpolation, not merely approximate.
  CHECK((a.X * *a.w_true - a.y).norm() == 0.0);

  const TaskSample c = sample_realizable_task(model, rng, 13);
  CHECK(!(a.X.array() == c.X.array()).all());
}

TEST_CASE("param_std = 0 pins every task to the centroid") {
  Vector centroid(3);
  centroid << 1.0, -2.0, 0.5;
  const RealizableModel model(3, 4, centroid, 0.0);
  const Rng rng(1, 0);
  for (int t = 0; t < 5; ++t) {
    const TaskSample task = sample_realizable_task(model, rng, t);
    CHECK((*task.w_true - centroid).norm() == 0.0);
  }
}

TEST_CASE("task variance matches R^2 = 1 at d = 60") {
  const Index d = 60;
  const RealizableModel model =
      RealizableModel::isotropic(d, 1, 1.0);  // param_std = 1/sqrt(60)
  CHECK(model.r_squared() == doctest::Approx(1.0));

  const Rng rng(2025, 0);
  const int tasks = 10000;
  double sum_sq = 0.0;
  for (int t = 0; t < tasks; ++t) {
    const TaskSample task = sample_realizable_task(model, rng, t);
    sum_sq += (*task.w_true - model.centroid).squaredNorm();
  }
  CHECK(sum_sq / tasks == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("counterexample tasks have the two-point support") {
  const CounterexampleModel model(7);
  const Rng rng(4, 0);
  for (int t = 0; t < 50; ++t) {
    const TaskSample task = sample_counterexample_task(model, rng, t);
    CHECK(!task.w_true.has_value());
    for (Index i = 0; i < model.n; ++i) {
      const double xy = task.X(i, 0) * task.y(i);
      CHECK((xy == 3.0 || xy == -3.0));
    }
    // s_t = X^T X / n stays in [1, 9].
    const double s = task.X.col(0).squaredNorm() / double(model.n);
    CHECK(s >= 1.0);
    CHECK(s <= 9.0);
  }
}

TEST_CASE("counterexample frequencies and second moment") {
  const Index n = 100000;
  const CounterexampleModel model(n);
  const Rng rng(5, 0);
  const TaskSample task = sample_counterexample_task(model, rng, 0);
  long ones = 0;
  double sum_x2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    ones += task.X(i, 0) == 1.0;
    sum_x2 += task.X(i, 0) * task.X(i, 0);
  }
  CHECK(std::abs(double(ones) / double(n) - 0.5) < 0.01);
  // E x^2 = (1 + 9) / 2 = 5 by enumeration of the two outcomes.
  CHECK(sum_x2 / double(n) == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("split_task shapes, edge cases, and exact reassembly") {
  const RealizableModel model = RealizableModel::isotropic(4, 20, 1.0);
  const Rng rng(6, 0);
  const TaskSample task = sample_realizable_task(model, rng, 0);

  const auto [empty_train, full_val] = split_task(task, SplitConfig(0, 20));
  CHECK(empty_train.X.rows() == 0);
  CHECK(full_val.X.rows() == 20);
  CHECK((full_val.X - task.X).norm() == 0.0);

  const auto [train, val] = split_task(task, SplitConfig(15, 5));
  CHECK(train.X.rows() == 15);
  CHECK(train.X.cols() == 4);
  CHECK(train.y.size() == 15);
  CHECK(val.X.rows() == 5);
  CHECK(val.y.size() == 5);

  Matrix joined(20, 4);
  joined << train.X, val.X;
  Vector joined_y(20);
  joined_y << train.y, val.y;
  CHECK((joined.array() == task.X.array()).all());
  CHECK((joined_y.array() == task.y.array()).all());

  CHECK_THROWS_AS(split_task(task, SplitConfig(10, 5)), std::invalid_argument);
}

TEST_CASE("realizable spectra have mean eigenvalue near one at n = d = 512") {
  const Index n = 512, d = 512;
  const RealizableModel model = RealizableModel::isotropic(d, n, 1.0);
  const Rng rng(7, 0);
  const TaskSample task = sample_realizable_task(model, rng, 0);
  // Mean Wishart eigenvalue equals the normalized squared Frobenius norm.
  const double mean_eig = task.X.squaredNorm() / double(n) / double(d);
  CHECK(mean_eig == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(RealizableModel(0, 1, Vector::Zero(1), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(RealizableModel(2, 1, Vector::Zero(3), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(RealizableModel(2, 1, Vector::Zero(2), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(CounterexampleModel(0), std::invalid_argument);
  CHECK_THROWS_AS(SplitConfig(-1, 5), std::invalid_argument);
  CHECK_THROWS_AS(SplitConfig(5, 0), std::invalid_argument);
}
