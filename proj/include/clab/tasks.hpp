#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "clab/linalg.hpp"
#include "clab/rng.hpp"

namespace clab {

// Noiseless linear task family: each task draws a parameter w_t around the
// centroid and observes y = X w_t with isotropic Gaussian inputs. The task
// variance is R^2 = d * param_std^2.
struct RealizableModel {
  Index d = 1;        // ambient dimension
  Index n = 1;        // per-task sample count
  Vector centroid;    // mean of the task parameters, length d
  double param_std = 0.0;  // per-coordinate std of w_t around the centroid

  RealizableModel(Index d_, Index n_, Vector centroid_, double param_std_);

  // Zero centroid with per-coordinate variance r_sq / d, i.e. R^2 = r_sq.
  static RealizableModel isotropic(Index d, Index n, double r_sq = 1.0);

  double r_squared() const { return double(d) * param_std * param_std; }
};

// Two-point scalar task law: (x, y) is (1, 3) or (3, -1) with equal
// probability. Under it the in-sample and test-time centroids differ.
struct CounterexampleModel {
  Index n = 1;

  explicit CounterexampleModel(Index n_);
};

// One task's observations. w_true is present exactly when the task came
// from the realizable model, and then X * w_true == y holds exactly.
struct TaskSample {
  Matrix X;
  Vector y;
  std::optional<Vector> w_true;
};

// Sizes of the train/validation partition of a task's n rows.
struct SplitConfig {
  Index n1 = 0;  // train rows (may be zero: the inner solver becomes the identity)
  Index n2 = 1;  // validation rows

  SplitConfig(Index n1_, Index n2_);
};

// Deterministic given (rng.seed, rng.stream, task_index); parallel callers
// can sample any subset of task indices in any order.
TaskSample sample_realizable_task(const RealizableModel& model, const Rng& rng,
                                  std::uint64_t task_index);
TaskSample sample_counterexample_task(const CounterexampleModel& model,
                                      const Rng& rng, std::uint64_t task_index);

// Prefix split: first n1 rows train, remaining n2 validation. Rows are
// exchangeable, so a fixed split is distributionally equivalent to a random
// one and keeps determinism trivial.
std::pair<TaskSample, TaskSample> split_task(const TaskSample& task,
                                             const SplitConfig& split);

}  // namespace clab
