#include "cdem/prototype.hpp"

#include <cmath>
#include <limits>

#include "cdem/errors.hpp"

namespace cdem {

using Eigen::MatrixXd;

PrototypeSet fit_prototypes(const MatrixXd& projected, std::span<const int> labels, int num_classes) {
    if (static_cast<Eigen::Index>(labels.size()) != projected.rows()) {
        throw InternalError("prototype labels do not match sample count");
    }
    if (num_classes < 1) throw InternalError("prototype fit needs at least one class");
    const Eigen::Index dim = projected.cols();
    PrototypeSet set;
    set.centers = MatrixXd::Zero(num_classes, dim);
    set.complement_centers = MatrixXd::Zero(num_classes, dim);
    set.counts.assign(static_cast<std::size_t>(num_classes), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || y >= num_classes) throw DataError("label " + std::to_string(y) + " outside class range");
        set.centers.row(y) += projected.row(static_cast<Eigen::Index>(i));
        ++set.counts[static_cast<std::size_t>(y)];
    }
    const Eigen::RowVectorXd total = set.centers.colwise().sum();
    const auto n = static_cast<double>(labels.size());
    for (int c = 0; c < num_classes; ++c) {
        const auto nc = static_cast<double>(set.counts[static_cast<std::size_t>(c)]);
        if (nc == 0.0) throw DataError("class " + std::to_string(c) + " has no members");
        if (n > nc) set.complement_centers.row(c) = (total - set.centers.row(c)) / (n - nc);
        set.centers.row(c) /= nc;
    }
    return set;
}

MatrixXd center_distances(const MatrixXd& points, const MatrixXd& centers) {
    if (points.cols() != centers.cols()) throw InternalError("points and centers differ in dimension");
    MatrixXd d(points.rows(), centers.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index c = 0; c < centers.rows(); ++c) d(i, c) = (points.row(i) - centers.row(c)).norm();
    return d;
}

MatrixXd softmax_neg_distance(const MatrixXd& distances) {
    MatrixXd p(distances.rows(), distances.cols());
    for (Eigen::Index i = 0; i < distances.rows(); ++i) {
        const double shift = distances.row(i).minCoeff();
        p.row(i) = (-(distances.row(i).array() - shift)).exp().matrix();
        p.row(i) /= p.row(i).sum();
    }
    return p;
}

MatrixXd source_probabilities(const PrototypeSet& prototypes, const MatrixXd& projected_targets) {
    return softmax_neg_distance(center_distances(projected_targets, prototypes.centers));
}

std::vector<int> row_argmax(const MatrixXd& scores) {
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < scores.cols(); ++c) {
            if (scores(i, c) > scores(i, best)) best = c;
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

std::vector<int> nearest_prototype(const MatrixXd& centers, const MatrixXd& points) {
    return row_argmax(-center_distances(points, centers));
}

namespace {

std::vector<int> assign_squared(const MatrixXd& points, const MatrixXd& centers, double* sse) {
    std::vector<int> out(static_cast<std::size_t>(points.rows()));
    double total = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        Eigen::Index best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < centers.rows(); ++c) {
            const double d = (points.row(i) - centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
        total += best_d;
    }
    if (sse) *sse = total;
    return out;
}

double within_sse(const MatrixXd& points, const MatrixXd& centers, const std::vector<int>& assignment) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        total += (points.row(i) - centers.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
    return total;
}

}  // namespace

KMeansResult target_kmeans(const MatrixXd& targets, const MatrixXd& initial_centers, const KMeansOptions& options) {
    const Eigen::Index k = initial_centers.rows();
    if (targets.cols() != initial_centers.cols()) throw InternalError("K-means centers differ in dimension");
    if (k < 1) throw InternalError("K-means needs at least one center");
    if (k > targets.rows()) {
        throw DataError("K-means with " + std::to_string(k) + " clusters on " + std::to_string(targets.rows()) +
                        " target samples");
    }
    KMeansResult result;
    MatrixXd centers = initial_centers;
    std::vector<int> assignment = assign_squared(targets, centers, nullptr);
    double previous_sse = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= options.max_iters; ++iter) {
        MatrixXd updated = MatrixXd::Zero(k, targets.cols());
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < targets.rows(); ++i) {
            const int c = assignment[static_cast<std::size_t>(i)];
            updated.row(c) += targets.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (Eigen::Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) updated.row(c) = centers.row(c);
            else updated.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
        const double shift = (updated - centers).cwiseAbs().maxCoeff();
        centers = std::move(updated);
        const double sse = within_sse(targets, centers, assignment);
        result.sse_trace.push_back(sse);
        result.iterations = iter;

        auto next = assign_squared(targets, centers, nullptr);
        const bool stable = next == assignment;
        const bool flat = std::isfinite(previous_sse) &&
                          std::abs(previous_sse - sse) <= options.tol * std::max(previous_sse, 1e-300);
        assignment = std::move(next);
        previous_sse = sse;
        if (shift == 0.0 || stable || flat) {
            result.converged = true;
            break;
        }
    }

    result.assignment = assignment;
    result.clusters.centers = centers;
    result.clusters.counts.assign(static_cast<std::size_t>(k), 0);
    for (int c : assignment) ++result.clusters.counts[static_cast<std::size_t>(c)];
    result.clusters.complement_centers = MatrixXd::Zero(k, targets.cols());
    const Eigen::RowVectorXd total = targets.colwise().sum();
    MatrixXd sums = MatrixXd::Zero(k, targets.cols());
    for (Eigen::Index i = 0; i < targets.rows(); ++i) sums.row(assignment[static_cast<std::size_t>(i)]) += targets.row(i);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto rest = static_cast<double>(targets.rows()) -
                          static_cast<double>(result.clusters.counts[static_cast<std::size_t>(c)]);
        if (rest > 0.0) result.clusters.complement_centers.row(c) = (total - sums.row(c)) / rest;
    }
    return result;
}

PseudoLabelTable make_pseudo_label_table(const MatrixXd& p_source, const MatrixXd& p_target, double target_weight) {
    if (p_source.rows() != p_target.rows() || p_source.cols() != p_target.cols()) {
        throw InternalError("source and target probability tables differ in shape");
    }
    PseudoLabelTable table;
    table.p_source = p_source;
    table.p_target = p_target;
    table.p = (1.0 - target_weight) * p_source + target_weight * p_target;
    table.y_source = row_argmax(p_source);
    table.y_target = row_argmax(p_target);
    table.y = row_argmax(table.p);
    const auto n = table.y.size();
    table.consistent.resize(n);
    table.selected.assign(n, false);
    table.confidence = table.p.rowwise().maxCoeff();
    for (std::size_t i = 0; i < n; ++i) table.consistent[i] = table.y_source[i] == table.y_target[i];
    return table;
}

PseudoLabelTable combined_pseudo_labels(const MatrixXd& p_source, const MatrixXd& p_target, int t, int total) {
    if (total < 1 || t < 1 || t > total) {
        throw ConfigError("iteration " + std::to_string(t) + " outside [1, " + std::to_string(total) + "]");
    }
    return make_pseudo_label_table(p_source, p_target, static_cast<double>(t) / static_cast<double>(total));
}

}  // namespace cdem
