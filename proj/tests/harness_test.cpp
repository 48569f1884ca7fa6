#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "clab/chart.hpp"
#include "clab/harness.hpp"

using namespace clab;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("clab_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

ExperimentConfig tiny_fig_b() {
  ExperimentConfig cfg;
  cfg.experiment = "fig_b";
  cfg.seed = 11;
  cfg.has_seed = true;
  cfg.d = 12;
  cfg.n = 6;
  cfg.n1 = 2;
  cfg.t_grid = {50, 100};
  cfg.replicates = 3;
  cfg.mc_samples = 120;
  return cfg;
}

}  // namespace

TEST_CASE("config file parsing") {
  TempDir tmp;
  const fs::path file = tmp.path / "cfg.txt";
  {
    std::ofstream out(file);
    out << "# comment line\n"
        << "experiment = fig_b\n"
        << "seed = 7\n"
        << "d = 30\n"
        << "n=10\n"
        << "n1 = 3\n"
        << "lambda = 0.5   # trailing comment\n"
        << "t_grid = 10:10:50\n"
        << "replicates = 4\n"
        << "mc_samples = 64\n"
        << "r_sq = 2.0\n"
        << "output_dir = some/dir\n";
  }
  ExperimentConfig cfg = load_config(file.string());
  CHECK(cfg.experiment == "fig_b");
  CHECK(cfg.seed == 7);
  CHECK(cfg.has_seed);
  CHECK(cfg.d == 30);
  CHECK(cfg.n == 10);
  CHECK(cfg.n1 == 3);
  CHECK(cfg.lambda == 0.5);
  CHECK(cfg.t_grid == std::vector<long>{10, 20, 30, 40, 50});
  CHECK(cfg.replicates == 4);
  CHECK(cfg.mc_samples == 64);
  CHECK(cfg.r_sq == 2.0);
  CHECK(cfg.output_dir == "some/dir");

  ExperimentConfig cfg2;
  apply_config_line(cfg2, "gamma_grid", "0.5,1,2");
  CHECK(cfg2.gamma_grid == std::vector<double>{0.5, 1.0, 2.0});
  CHECK_THROWS_AS(apply_config_line(cfg2, "bogus", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(cfg2, "d", "abc"), ConfigError);
  CHECK_THROWS_AS(load_config((tmp.path / "missing.txt").string()), ConfigError);
}

TEST_CASE("defaults and validation") {
  ExperimentConfig cfg;
  cfg.experiment = "fig_b";
  CHECK_THROWS_AS(apply_defaults(cfg), ConfigError);  // seed required

  cfg.seed = 1;
  cfg.has_seed = true;
  apply_defaults(cfg);
  CHECK(cfg.d == 60);
  CHECK(cfg.n == 20);
  CHECK(cfg.n1 == 5);
  CHECK(cfg.replicates == 50);
  CHECK(cfg.t_grid.size() == 50);
  CHECK(cfg.t_grid.front() == 20);
  CHECK(cfg.t_grid.back() == 1000);

  ExperimentConfig ce;
  ce.experiment = "counterexample";
  ce.seed = 1;
  ce.has_seed = true;
  apply_defaults(ce);
  CHECK(ce.n == 5);
  CHECK(ce.n1 == 4);
  CHECK(ce.lambda == 1.0);
  CHECK(ce.replicates == 1);

  ExperimentConfig bad;
  bad.experiment = "fig_z";
  bad.seed = 1;
  bad.has_seed = true;
  CHECK_THROWS_AS(apply_defaults(bad), ConfigError);

  ExperimentConfig bad_split = tiny_fig_b();
  bad_split.n1 = 6;  // n1 must stay below n
  CHECK_THROWS_AS(apply_defaults(bad_split), ConfigError);

  ExperimentConfig bad_grid = tiny_fig_b();
  bad_grid.t_grid = {100, 50};
  CHECK_THROWS_AS(apply_defaults(bad_grid), ConfigError);
}

TEST_CASE("tuned lambda lands near the proportional-limit argmin") {
  const Rng rng(2, 0);
  const double base = optimize_rho(3.0).lambda_star;
  const double tuned = tune_trtr_lambda(60, 20, 200, rng, 1.0, 2);
  CHECK(tuned >= base / 4.0 - 1e-12);
  CHECK(tuned <= base * 4.0 + 1e-12);
}

TEST_CASE("fig_b runs are deterministic across calls and thread counts") {
  ExperimentConfig cfg = tiny_fig_b();
  const auto rows1 = run_experiment(cfg);
  const auto rows2 = run_experiment(cfg);
  REQUIRE(rows1.size() == rows2.size());
  CHECK(rows1 == rows2);

  ExperimentConfig threaded = cfg;
  threaded.threads = 2;
  const auto rows3 = run_experiment(threaded);
  CHECK(rows1 == rows3);

  // 2 grid points x (3 measured + 3 reference rows).
  CHECK(rows1.size() == 12);
  for (const auto& row : rows1) {
    CHECK(row.experiment == "fig_b");
    CHECK(std::isfinite(row.value));
    CHECK(row.std_err >= 0.0);
  }
}

TEST_CASE("fig_a rows respect the analytic ordering") {
  ExperimentConfig cfg;
  cfg.experiment = "fig_a";
  cfg.seed = 5;
  cfg.has_seed = true;
  cfg.gamma_grid = {0.5, 1.0, 2.0};
  cfg.n = 20;
  cfg.n1 = 5;
  cfg.mc_samples = 150;
  const auto rows = run_experiment(cfg);

  for (const double gamma : cfg.gamma_grid) {
    double trtr = 0, sp0 = 0, spk = 0, upper = 0;
    for (const auto& row : rows) {
      if (row.coordinate != gamma) continue;
      if (row.method == "trtr") trtr = row.value;
      if (row.method == "sp_n1_0") sp0 = row.value;
      if (row.method == "sp_n1_k") spk = row.value;
      if (row.method == "reference_upper_bound") upper = row.value;
    }
    CHECK(trtr <= upper + 1e-9);
    CHECK(trtr < sp0);
    CHECK(trtr < spk);
    CHECK(sp0 == sp_limit_rate(gamma));
  }
}

TEST_CASE("counterexample experiment emits trajectories and targets") {
  ExperimentConfig cfg;
  cfg.experiment = "counterexample";
  cfg.seed = 9;
  cfg.has_seed = true;
  cfg.t_grid = {200, 400};
  const auto rows = run_experiment(cfg);
  CHECK(rows.size() == 10);  // 2 coordinates x 5 methods

  double ref_trtr = 0, ref_test = 0;
  for (const auto& row : rows) {
    if (row.method == "reference_w_trtr_star") ref_trtr = row.value;
    if (row.method == "reference_w_test_star") ref_test = row.value;
  }
  CHECK(ref_trtr > 0.0);
  CHECK(ref_test < 0.0);
}

TEST_CASE("rates experiment emits finite tables") {
  ExperimentConfig cfg;
  cfg.experiment = "rates";
  cfg.seed = 4;
  cfg.has_seed = true;
  cfg.d = 10;
  cfg.n = 8;
  cfg.n1 = 3;
  cfg.mc_samples = 100;
  const auto rows = run_experiment(cfg);
  CHECK(rows.size() == 9 * 5);
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.value));
  }
}

TEST_CASE("csv round trip and byte-identical rewrites") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_fig_b();
  const auto rows = run_experiment(cfg);

  const auto path_a = (tmp.path / "a.csv").string();
  const auto path_b = (tmp.path / "b.csv").string();
  emit_csv(rows, path_a);
  emit_csv(rows, path_b);
  CHECK(slurp(path_a) == slurp(path_b));

  auto parsed = parse_csv(path_a);
  auto expected = rows;
  sort_rows(expected);
  REQUIRE(parsed.size() == expected.size());
  CHECK(parsed == expected);

  CHECK_THROWS_AS(emit_csv({}, path_a), std::invalid_argument);
  CHECK_THROWS_AS(emit_csv(rows, (tmp.path / "no_dir" / "x.csv").string()),
                  IoError);
}

TEST_CASE("chart writer produces a self-contained svg") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_fig_b();
  const auto rows = run_experiment(cfg);
  const auto path = (tmp.path / "plot.svg").string();
  ChartOptions options;
  options.title = "test";
  options.log_x = true;
  options.log_y = true;
  emit_chart(rows, path, options);
  const std::string svg = slurp(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK_THROWS_AS(emit_chart({}, path), std::invalid_argument);
}

TEST_CASE("write_outputs creates csv, chart, and config dump") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_fig_b();
  cfg.output_dir = (tmp.path / "out").string();
  const auto rows = run_experiment(cfg);
  write_outputs(cfg, rows);
  CHECK(fs::exists(tmp.path / "out" / "fig_b.csv"));
  CHECK(fs::exists(tmp.path / "out" / "fig_b.svg"));
  CHECK(fs::exists(tmp.path / "out" / "fig_b_config.txt"));

  const std::string meta = slurp(tmp.path / "out" / "fig_b_config.txt");
  CHECK(meta.find("replicates = 3") != std::string::npos);
  CHECK(meta.find("seed = 11") != std::string::npos);
}
