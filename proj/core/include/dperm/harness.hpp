#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dperm/curvature.hpp"
#include "dperm/dataset.hpp"
#include "dperm/models.hpp"
#include "dperm/optim.hpp"
#include "dperm/privacy.hpp"

namespace dperm {

struct ExperimentConfig {
  std::string dataset_path;
  std::string dataset_format = "libsvm";  // libsvm | csv | csv_header
  std::string dataset_id;                 // short name used in output files
  LossKind objective = LossKind::logistic;
  double lambda = 1e-4;
  double clip = 1.0;          // 0.5 when high_dimensional and not set explicitly
  bool high_dimensional = false;
  std::vector<std::string> algorithms = {"dp_gd", "dp_sgd", "out_gd", "out_sgd"};
  std::vector<double> epsilons = {0.1};
  double delta = 0.0;         // <= 0 selects the default rule 1/n_train^2
  std::vector<std::int64_t> t_grid = {50, 200, 800};
  std::vector<double> eta_grid = {0.1, 1.0, 5.0};  // {0.2, 2, 10} when high-dimensional
  double q = 0.1;             // dp_sgd Poisson sampling ratio
  std::int64_t repeats = 20;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  bool force_sigma_zero = false;  // ablation: run every algorithm noise-free
  bool write_traces = true;
  bool row_normalize = false;
};

// Strict JSON loader: unknown keys are an error. The high-dimensional clip and
// learning-rate defaults apply only when the keys are absent.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ResultRow {
  std::string dataset;
  std::string algorithm;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t chosen_t = 0;
  double chosen_eta = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_excess_risk = 0.0;
  std::int64_t repeats = 0;
  double noise_multiplier = 0.0;
  bool selected = true;   // false for non-winning grid cells in the grid file
  bool feasible = true;
  std::string note;
};

// Full sweep: per algorithm x epsilon, calibrate once per (T, q), run the grid
// with `repeats` seeded runs per cell, select the cell with the best mean
// validation accuracy (ties to smaller T, then smaller eta), and write
// results.csv, results_grid.csv, traces/*.jsonl and manifest.json under the
// output directory (DPERM_OUTPUT_DIR overrides it). Returns the selected rows.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// F(params) - F(x_*) on the training objective. The first overload computes
// the reference optimum itself at tol 1e-10.
double excess_risk(const Dataset& ds_train, const LossSpec& spec,
                   const std::vector<double>& params);
double excess_risk(const Dataset& ds_train, const LossSpec& spec,
                   const std::vector<double>& params, const std::vector<double>& x_star);

struct ScalingConfig {
  std::int64_t n = 20000;
  std::int32_t p = 10;
  double lambda = 0.1;
  double clip = 1.0;
  double margin = 4.0;     // logit scale of the synthetic labels
  std::int64_t repeats = 50;
  double epsilon = 0.8;    // fixed budget for the n family
  std::uint64_t seed = 20240601;
  bool force_sigma_zero = false;
};

struct SlopeEstimate {
  double slope = 0.0;
  double se = 0.0;
  std::vector<double> points;      // family values
  std::vector<double> mean_risks;  // mean excess risk per point
};

// Least-squares slope of log(mean excess risk) against log(point) for dp_gd on
// a synthetic strongly convex logistic task, run at eta = 1/beta_hat and
// T = ceil(2 log n / (eta nu_hat)). family is "epsilon" or "n"; needs >= 4
// points and repeats >= 50. Throws if any point's mean risk is not positive.
SlopeEstimate scaling_study(const std::string& family, const std::vector<double>& points,
                            const ScalingConfig& base);

// Synthetic task generator shared by the scaling study and its tests: unit-norm
// Gaussian rows, labels drawn from a planted logit model at the given margin.
Dataset synthetic_logistic(std::int64_t n, std::int32_t p, double margin, std::uint64_t seed);

// results.csv writer: stable column order, floats at 6 significant digits,
// byte-deterministic. Throws on empty rows or unwritable path.
void emit_table(const std::vector<ResultRow>& rows, const std::string& path);

// Grid file including non-selected cells.
void emit_grid(const std::vector<ResultRow>& rows, const std::string& path);

// curvature_<dataset>.csv writer: columns step, lambda, avg_curvature,
// min_curvature, nu_hat, nu_se (last two blank when absent).
void emit_plot_data(const std::vector<CurvatureTrace>& traces, const std::string& path);

// One JSON object per step, then a closing summary object (final and averaged
// parameters, final objective, accuracy when supplied).
std::string trace_to_jsonl(const RunTrace& trace, double final_objective,
                           double accuracy_pct);

// Accountant recheck used before a row is emitted: recomputes epsilon from the
// recorded (z, q, T) and returns it (callers assert <= declared epsilon).
double recheck_epsilon(const std::string& algorithm, double z, double q, std::int64_t steps,
                       double delta);

// manifest.json: config hash, per-file sha256 content hashes, and the
// selection/accounting notes. Deterministic bytes.
void write_manifest(const std::string& dir, const std::string& config_canonical,
                    const std::vector<std::pair<std::string, std::string>>& file_hashes);

}  // namespace dperm
