#include "clab/tasks.hpp"

#include <cmath>

namespace clab {

RealizableModel::RealizableModel(Index d_, Index n_, Vector centroid_,
                                 double param_std_)
    : d(d_), n(n_), centroid(std::move(centroid_)), param_std(param_std_) {
  if (d < 1 || n < 1) {
    throw std::invalid_argument("RealizableModel: d and n must be >= 1");
  }
  if (centroid.size() != d) {
    throw std::invalid_argument("RealizableModel: centroid length != d");
  }
  require_finite(centroid, "RealizableModel centroid");
  if (!(param_std >= 0.0) || !std::isfinite(param_std)) {
    throw std::invalid_argument("RealizableModel: param_std must be finite and >= 0");
  }
}

RealizableModel RealizableModel::isotropic(Index d, Index n, double r_sq) {
  if (!(r_sq >= 0.0) || !std::isfinite(r_sq)) {
    throw std::invalid_argument("RealizableModel: r_sq must be finite and >= 0");
  }
  return RealizableModel(d, n, Vector::Zero(d), std::sqrt(r_sq / double(d)));
}

CounterexampleModel::CounterexampleModel(Index n_) : n(n_) {
  if (n < 1) {
    throw std::invalid_argument("CounterexampleModel: n must be >= 1");
  }
}

SplitConfig::SplitConfig(Index n1_, Index n2_) : n1(n1_), n2(n2_) {
  if (n1 < 0 || n2 < 1) {
    throw std::invalid_argument("SplitConfig: need n1 >= 0 and n2 >= 1");
  }
}

TaskSample sample_realizable_task(const RealizableModel& model, const Rng& rng,
                                  std::uint64_t task_index) {
  Rng local = rng.derive(task_index);
  Vector w = model.centroid;
  if (model.param_std > 0.0) {
    w += model.param_std * gaussian_vector(local, model.d);
  }
  Matrix X = gaussian_matrix(local, model.n, model.d);
  TaskSample task;
  task.y = X * w;
  task.X = std::move(X);
  task.w_true = std::move(w);
  return task;
}

TaskSample sample_counterexample_task(const CounterexampleModel& model,
                                      const Rng& rng, std::uint64_t task_index) {
  Rng local = rng.derive(task_index);
  TaskSample task;
  task.X.resize(model.n, 1);
  task.y.resize(model.n);
  for (Index i = 0; i < model.n; ++i) {
    if (local.next_double() < 0.5) {
      task.X(i, 0) = 1.0;
      task.y(i) = 3.0;
    } else {
      task.X(i, 0) = 3.0;
      task.y(i) = -1.0;
    }
  }
  return task;
}

std::pair<TaskSample, TaskSample> split_task(const TaskSample& task,
                                             const SplitConfig& split) {
  if (split.n1 + split.n2 != task.X.rows()) {
    throw std::invalid_argument("split_task: n1 + n2 != task rows");
  }
  TaskSample train;
  train.X = task.X.topRows(split.n1);
  train.y = task.y.head(split.n1);
  train.w_true = task.w_true;
  TaskSample val;
  val.X = task.X.bottomRows(split.n2);
  val.y = task.y.tail(split.n2);
  val.w_true = task.w_true;
  return {std::move(train), std::move(val)};
}

}  // namespace clab
