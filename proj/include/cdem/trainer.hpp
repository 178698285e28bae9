#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cdem/config.hpp"
#include "cdem/matio.hpp"
#include "cdem/preprocess.hpp"
#include "cdem/prototype.hpp"

namespace cdem {

/// 0/1-loss rates of nearest-prototype classifiers fit in each domain.
struct CrossDomainErrors {
    double source_by_source = 0.0;  // eps_s(f_s)
    double target_by_target = 0.0;  // eps_t(f_t)
    double source_by_target = 0.0;  // eps_s(f_t)
    double target_by_source = 0.0;  // eps_t(f_s)
};

struct IterationRecord {
    int t = 0;
    double objective = 0.0;  // tr(P^T X Omega X^T P)
    double eig_residual = 0.0;
    std::vector<std::size_t> selected_per_class;
    std::size_t selected_total = 0;
    std::size_t consistent_total = 0;
    double label_agreement = 0.0;  // fraction of targets whose pseudo label did not change
    int kmeans_iterations = 0;
    std::size_t skipped_terms = 0;
    CrossDomainErrors pseudo_errors;         // against current pseudo labels
    std::optional<double> accuracy;          // filled by an evaluation observer
    std::optional<CrossDomainErrors> errors;  // filled by an evaluation observer
};

/// Features after PCA and optional row normalization.
struct PreparedPair {
    Eigen::MatrixXd source;
    Eigen::MatrixXd target;
    PcaModel pca;
};

/// Fits PCA on [X_s; X_t] (or X_s alone when pca_joint is off), projects both domains to
/// pca_dim and normalizes rows when configured.
PreparedPair prepare_features(const DomainPair& pair, const ExperimentConfig& config);

/// What an observer sees after each iteration; it never feeds back into training.
struct IterationView {
    int t = 0;
    const Eigen::MatrixXd& projection;
    const Eigen::MatrixXd& projected_source;
    const Eigen::MatrixXd& projected_target;
    const PseudoLabelTable& labels;
};

using IterationObserver = std::function<void(const IterationView&, IterationRecord&)>;

struct AdaptationResult {
    Eigen::MatrixXd projection;  // m x k
    Eigen::VectorXd theta;
    std::vector<IterationRecord> iterations;
    std::vector<int> predictions;
    PseudoLabelTable final_labels;
    Eigen::MatrixXd projected_source;
    Eigen::MatrixXd projected_target;
};

/// Alternates transformation learning and curriculum pseudo-labelling for config.iterations
/// rounds. Target labels are never consulted.
AdaptationResult run_cdem(const DomainPair& pair, const ExperimentConfig& config,
                          const IterationObserver& observer = {});

/// Nearest-prototype error rates in an already projected space. Classes without members in a
/// domain get no prototype there.
CrossDomainErrors evaluate_cross_domain_errors(const Eigen::MatrixXd& projected_source,
                                               std::span<const int> source_labels,
                                               const Eigen::MatrixXd& projected_target,
                                               std::span<const int> target_labels, int num_classes);

/// Same, projecting with P first.
CrossDomainErrors evaluate_cross_domain_errors(const Eigen::MatrixXd& projection, const Eigen::MatrixXd& source,
                                               std::span<const int> source_labels, const Eigen::MatrixXd& target,
                                               std::span<const int> target_labels, int num_classes);

/// Percentage of matching entries.
double accuracy_percent(std::span<const int> predicted, std::span<const int> truth);

}  // namespace cdem
