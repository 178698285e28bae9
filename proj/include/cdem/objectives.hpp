#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cdem/config.hpp"

namespace cdem {

/// Target entry of a JointLabeling that takes no part in label-dependent terms.
inline constexpr int kUnselected = -1;

/// Labels over the joint sample ordering [source; target].
/// The first n_source entries are true source labels; each target entry is either its
/// current pseudo label or kUnselected.
struct JointLabeling {
    std::size_t n_source = 0;
    int num_classes = 0;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::size_t n_target() const { return labels.size() - n_source; }
    bool participates(std::size_t i) const { return labels[i] != kUnselected; }

    /// Throws InternalError on out-of-range labels or a source entry marked unselected.
    void validate() const;

    static JointLabeling from(const std::vector<int>& source_labels, const std::vector<int>& target_labels,
                              const std::vector<bool>& target_selected, int num_classes);
};

/// Terms skipped because a class is missing on one side of the selected set.
struct BuildReport {
    std::vector<std::string> skipped;
};

/// Every n x n quadratic-form matrix of the objective, over n = n_s + n_t samples.
struct ObjectiveMatrices {
    Eigen::MatrixXd label_projection;  // Q^Y: block-diagonal I - Y(Y^T Y)^-1 Y^T
    Eigen::MatrixXd complement_sum;    // sum_c Qhat^c, class-center vs complement-center push-away
    Eigen::MatrixXd mmd;               // M = M_0 + sum_c M_c
    Eigen::MatrixXd cross_st;          // sum_c n_{s,c} Qhat^c_{s,t}
    Eigen::MatrixXd cross_ts;          // sum_c n_{t,c} Qhat^c_{t,s}
    Eigen::MatrixXd similarity;        // W: 1 where both samples carry the same label
    Eigen::MatrixXd laplacian;         // L = B - W
    Eigen::MatrixXd centering;         // H = I - (1/n) 1 1^T
    BuildReport report;
};

struct ObjectiveOptions {
    /// Unselected targets still enter the marginal alignment term M_0.
    bool include_unselected_in_m0 = true;
};

struct ComposeOptions {
    ComponentFlags components;
    /// Scales the empirical-error terms by (1 - beta), as in the unrolled form of the error.
    bool legacy_beta_prefactor = false;
};

Eigen::MatrixXd build_label_projection(const JointLabeling& labeling);

/// sum_c blockdiag(n_{s,c} Qhat_{s,c}, n_{t,c} Qhat_{t,c}). A source domain with a single
/// class is a ConfigError; target classes without members or complement are skipped.
Eigen::MatrixXd build_complement_matrices(const JointLabeling& labeling, BuildReport* report = nullptr);

/// Marginal term M_0 over all source samples and either all or only the selected targets.
Eigen::MatrixXd build_marginal_mmd(const JointLabeling& labeling, bool include_unselected_targets = true);

/// sum_c weight_c * M_c over classes present on both sides; weight_c is 1, or n_{s,c} + n_{t,c}
/// when class_weighted is set.
Eigen::MatrixXd build_conditional_mmd(const JointLabeling& labeling, bool class_weighted = false,
                                      BuildReport* report = nullptr);

/// M = M_0 + sum_c M_c.
Eigen::MatrixXd build_mmd(const JointLabeling& labeling, bool include_unselected_targets = true,
                          BuildReport* report = nullptr);

/// (sum_c n_{s,c} Qhat^c_{s,t}, sum_c n_{t,c} Qhat^c_{t,s}). Qhat^c_{s,t} is the rank-one form of
/// the source class-c center against the target complement center of c, and Qhat^c_{t,s} the
/// mirror image.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_cross_domain(const JointLabeling& labeling,
                                                               BuildReport* report = nullptr);

struct LaplacianParts {
    Eigen::MatrixXd similarity;
    Eigen::MatrixXd laplacian;
};

LaplacianParts build_laplacian(const JointLabeling& labeling);

Eigen::MatrixXd build_centering(std::size_t n);

/// Builds every term matrix on one labeling.
ObjectiveMatrices build_objectives(const JointLabeling& labeling, const ObjectiveOptions& options = {});

/// Omega = Q^Y + lambda M + eta L - (beta sum Qhat^c + gamma sum Qhat_{s,t} + gamma sum Qhat_{t,s}),
/// restricted to the enabled components.
Eigen::MatrixXd compose_omega(const ObjectiveMatrices& parts, const Hyperparams& hp,
                              const ComposeOptions& options = {});

/// Matrix whose quadratic form equals the cross-domain error eps_s(f_t) + eps_t(f_s) of two
/// prototype classifiers:
///   (1 - beta) Q^Y + sum_c (n_{s,c} + n_{t,c}) M_c - beta (cross_st + cross_ts).
/// Every class needs members and complements on both sides (DataError otherwise).
Eigen::MatrixXd cross_domain_error_matrix(const JointLabeling& labeling, double beta);

}  // namespace cdem
