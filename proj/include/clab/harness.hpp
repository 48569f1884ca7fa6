#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clab/asymptotics.hpp"
#include "clab/csv.hpp"
#include "clab/rng.hpp"

namespace clab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolved experiment configuration. Grids left empty and counts left at 0
// are filled with per-experiment defaults by apply_defaults().
struct ExperimentConfig {
  std::string experiment;  // fig_a | fig_b | fig_c | counterexample | rates
  std::uint64_t seed = 0;
  bool has_seed = false;

  Index d = 0;           // 0 = experiment default
  Index n = 0;           // 0 = experiment default
  Index n1 = -1;         // train rows of the non-trivial split variant; -1 = default
  double lambda = 0.0;   // non-split regularization; 0 = tune automatically
  std::vector<long> t_grid;
  std::vector<double> gamma_grid;
  int replicates = 0;
  int mc_samples = 0;    // 0 = dimension-based default budget
  double r_sq = 1.0;
  std::string output_dir = "out";

  // Command-line only knobs.
  int threads = 1;
  bool chart = true;
};

// Flat key=value file; '#' starts a comment. Grid values accept either a
// comma list ("100,200,400") or a range ("start:step:end", inclusive).
// Unknown keys are config errors.
ExperimentConfig load_config(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                       const std::string& value);

// Fills per-experiment defaults and validates; throws ConfigError.
void apply_defaults(ExperimentConfig& cfg);

// "Well-tuned" non-split regularization: start from the proportional-limit
// argmin and refine over a 5-point log grid by the finite-(n, d)
// Monte-Carlo rate, reusing one spectrum sample across the grid.
double tune_trtr_lambda(Index d, Index n, int mc_samples, const Rng& rng,
                        double r_sq, int threads);

std::vector<ResultRow> run_fig_a(const ExperimentConfig& cfg);
std::vector<ResultRow> run_fig_b(const ExperimentConfig& cfg);
std::vector<ResultRow> run_fig_c(const ExperimentConfig& cfg);
std::vector<ResultRow> run_counterexample(const ExperimentConfig& cfg);
std::vector<ResultRow> run_rates(const ExperimentConfig& cfg);

// Dispatch on cfg.experiment (defaults already applied).
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Writes <out>/<experiment>.csv, an SVG chart (unless disabled) and the
// resolved configuration next to them. Deterministic: equal configs give
// byte-identical files for any thread count.
void write_outputs(const ExperimentConfig& cfg,
                   const std::vector<ResultRow>& rows);

}  // namespace clab
