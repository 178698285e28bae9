#pragma once

// Experiment harness.
//
// Config file keys (flat key=value, '#' comments):
//   source_features, source_labels, target_features   input files (CDEM-MAT v1 or CSV)
//   target_labels                                      optional, evaluation only
//   num_classes                                        0 or absent: inferred from source labels
//   domain.<name>.features, domain.<name>.labels       dataset registry (e.g. domain.C.features)
//   tasks                                              comma list of SRC-TGT registry pairs
//   pca_dim, subspace_dim, iterations, seed
//   beta, lambda, gamma, eta, delta
//   components                                         comma list of erm,da,cde,dfl (default all)
//   normalize, pca_fit (joint|source), legacy_beta_prefactor, include_unselected_in_m0
//   kmeans_warm_start, kmeans_max_iters, kmeans_tol
//   out_dir, dump_dir
// CDEM_THREADS caps how many tasks run at once.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cdem/config.hpp"
#include "cdem/matio.hpp"
#include "cdem/trainer.hpp"

namespace cdem {

/// First two projected coordinates of every sample, tagged with domain (0 source, 1 target)
/// and class (true source label, predicted target label).
struct Embedding {
    Eigen::MatrixXd coords;
    std::vector<int> domain;
    std::vector<int> label;
};

struct TaskResult {
    std::string task;
    std::string method;
    std::optional<double> accuracy;  // percent; absent without target labels
    std::vector<IterationRecord> trace;
    std::vector<int> predictions;
    double wall_time_s = 0.0;
    std::optional<Embedding> embedding;
};

/// Nearest-prototype classifier fit on the preprocessed source and applied to the target.
TaskResult run_baseline_source_only(const DomainPair& pair, const ExperimentConfig& config,
                                    const std::optional<LabelVector>& target_labels);

/// One CDEM run; when target labels are given the per-iteration records carry accuracy
/// and cross-domain errors measured against them.
TaskResult run_cdem_task(const DomainPair& pair, const ExperimentConfig& config,
                         const std::optional<LabelVector>& target_labels, const std::string& method = "cdem");

/// ERM, ERM+DA, ERM+DA+CDE and ERM+DA+CDE+DFL in that order.
std::vector<TaskResult> run_ablation_suite(const DomainPair& pair, const ExperimentConfig& config,
                                           const std::optional<LabelVector>& target_labels);

std::vector<ComponentFlags> ablation_settings();

/// Worker count from CDEM_THREADS, defaulting to the hardware concurrency.
unsigned task_threads();

/// Runs job(i) for i in [0, count) on up to task_threads() workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job);

/// results.csv: one row per task x method plus an "Avg" row per method with two or more
/// tasks; accuracy printed with one decimal.
std::string results_csv(const std::vector<TaskResult>& results);

/// Writes results.csv, report.json (full traces) and one embedding CSV per result carrying
/// an embedding. Wall times go to timing.csv so the other files are reproducible.
void emit_report(const std::vector<TaskResult>& results, const std::filesystem::path& dir);

struct GridPoint {
    Hyperparams hp;
    double accuracy = 0.0;
};

/// Values swept for each hyperparameter named in a grid search.
const std::vector<double>& grid_values();

/// Cartesian sweep of the named hyperparameters (beta, lambda, gamma, eta) over grid_values().
std::vector<GridPoint> grid_search(const DomainPair& pair, const ExperimentConfig& config,
                                   const LabelVector& target_labels, const std::vector<std::string>& params);

}  // namespace cdem
