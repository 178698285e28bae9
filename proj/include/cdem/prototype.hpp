#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cdem {

/// Per-class centers in a projected space. Row c of `centers` is the mean of class c,
/// row c of `complement_centers` the mean of every sample outside class c (zero when
/// the complement is empty).
struct PrototypeSet {
    Eigen::MatrixXd centers;
    Eigen::MatrixXd complement_centers;
    std::vector<std::size_t> counts;

    int num_classes() const { return static_cast<int>(centers.rows()); }
};

/// Class means of `projected` rows. Every class in [0, num_classes) must be present.
PrototypeSet fit_prototypes(const Eigen::MatrixXd& projected, std::span<const int> labels, int num_classes);

/// n x C Euclidean distances between rows of `points` and rows of `centers`.
Eigen::MatrixXd center_distances(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers);

/// Row-wise softmax of negative distances, shifted by the row minimum before exponentiation.
Eigen::MatrixXd softmax_neg_distance(const Eigen::MatrixXd& distances);

/// p_s(y|x): softmax over negative (unsquared) distances to the source class centers.
Eigen::MatrixXd source_probabilities(const PrototypeSet& prototypes, const Eigen::MatrixXd& projected_targets);

/// Row-wise argmax, ties going to the lower class index.
std::vector<int> row_argmax(const Eigen::MatrixXd& scores);

/// Nearest-center class of each row; ties go to the lower class index.
std::vector<int> nearest_prototype(const Eigen::MatrixXd& centers, const Eigen::MatrixXd& points);

struct KMeansOptions {
    int max_iters = 100;
    double tol = 1e-6;  // relative change of the within-cluster sum of squares
};

struct KMeansResult {
    PrototypeSet clusters;       // cluster c keeps the class id of initial center c
    std::vector<int> assignment;
    std::vector<double> sse_trace;  // within-cluster SSE after each update step
    int iterations = 0;
    bool converged = false;
};

/// Lloyd iterations started from `initial_centers` (one row per class). A cluster that
/// loses every member keeps its previous center so the class/cluster mapping stays one-to-one.
KMeansResult target_kmeans(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& initial_centers,
                           const KMeansOptions& options = {});

/// Per-target-sample pseudo-label state.
struct PseudoLabelTable {
    Eigen::MatrixXd p_source;   // n_t x C
    Eigen::MatrixXd p_target;   // n_t x C
    Eigen::MatrixXd p;          // combined
    std::vector<int> y_source;
    std::vector<int> y_target;
    std::vector<int> y;
    std::vector<bool> consistent;  // y_source == y_target
    std::vector<bool> selected;    // filled by curriculum selection
    Eigen::VectorXd confidence;    // max_c p(c)

    std::size_t size() const { return y.size(); }
};

/// p = (1 - w) p_source + w p_target with pseudo labels, consistency flags and confidences.
PseudoLabelTable make_pseudo_label_table(const Eigen::MatrixXd& p_source, const Eigen::MatrixXd& p_target,
                                         double target_weight);

/// make_pseudo_label_table with w = t / T; t must lie in [1, T].
PseudoLabelTable combined_pseudo_labels(const Eigen::MatrixXd& p_source, const Eigen::MatrixXd& p_target, int t,
                                        int total);

}  // namespace cdem
