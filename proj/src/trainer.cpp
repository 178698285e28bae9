#include "cdem/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "cdem/curriculum.hpp"
#include "cdem/eigsolve.hpp"
#include "cdem/errors.hpp"
#include "cdem/objectives.hpp"

namespace cdem {

using Eigen::MatrixXd;

namespace {

[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context) {
    const std::string msg = context + ": " + e.what();
    if (dynamic_cast<const NumericError*>(&e)) throw NumericError(msg);
    if (dynamic_cast<const DataError*>(&e)) throw DataError(msg);
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
    if (dynamic_cast<const FormatError*>(&e)) throw FormatError(msg);
    if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
    if (dynamic_cast<const InternalError*>(&e)) throw InternalError(msg);
    throw Error(msg);
}

/// Class means over present classes only; absent classes are marked in `present`.
struct PartialPrototypes {
    MatrixXd centers;
    std::vector<bool> present;
};

PartialPrototypes partial_prototypes(const MatrixXd& points, std::span<const int> labels, int num_classes) {
    PartialPrototypes out{MatrixXd::Zero(num_classes, points.cols()), std::vector<bool>(num_classes, false)};
    std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.centers.row(labels[i]) += points.row(static_cast<Eigen::Index>(i));
        counts[static_cast<std::size_t>(labels[i])] += 1.0;
    }
    for (int c = 0; c < num_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0.0) {
            out.centers.row(c) /= counts[static_cast<std::size_t>(c)];
            out.present[static_cast<std::size_t>(c)] = true;
        }
    }
    return out;
}

double error_rate(const PartialPrototypes& protos, const MatrixXd& points, std::span<const int> labels) {
    if (labels.empty()) return 0.0;
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < protos.centers.rows(); ++c) {
            if (!protos.present[static_cast<std::size_t>(c)]) continue;
            const double d = (points.row(i) - protos.centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best != labels[static_cast<std::size_t>(i)]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

void dump_iteration(const std::filesystem::path& dir, int t, const MatrixXd& features, const MatrixXd& omega,
                    const MatrixXd& centering, const Hyperparams& hp, const TransformSolution& sol) {
    std::filesystem::create_directories(dir);
    const std::string prefix = "iter" + std::to_string(t) + "_";
    MatrixXd a = features.transpose() * (omega * features);
    a.diagonal().array() += hp.delta;
    const MatrixXd b = features.transpose() * (centering * features);
    write_matrix(a, dir / (prefix + "A.cdm"));
    write_matrix(b, dir / (prefix + "B.cdm"));
    write_matrix(omega, dir / (prefix + "omega.cdm"));
    write_matrix(sol.projection, dir / (prefix + "P.cdm"));
    write_matrix(MatrixXd(sol.theta.transpose()), dir / (prefix + "theta.cdm"));
}

}  // namespace

PreparedPair prepare_features(const DomainPair& pair, const ExperimentConfig& config) {
    const auto d = static_cast<int>(pair.source.cols());
    config.validate(d);
    const int m = config.pca_dim > 0 ? config.pca_dim : d;
    const auto ns = pair.source.rows();
    const auto nt = pair.target.rows();

    MatrixXd joint(ns + nt, d);
    joint << pair.source.values(), pair.target.values();
    PreparedPair out;
    out.pca = fit_pca(config.pca_joint ? FeatureMatrix(joint) : pair.source, m);
    FeatureMatrix projected = transform(out.pca, FeatureMatrix(std::move(joint)));
    if (config.normalize) projected = normalize_rows(projected);
    out.source = projected.values().topRows(ns);
    out.target = projected.values().bottomRows(nt);
    return out;
}

AdaptationResult run_cdem(const DomainPair& pair, const ExperimentConfig& config, const IterationObserver& observer) {
    const PreparedPair prep = prepare_features(pair, config);
    const int num_classes = pair.num_classes();
    const int total = config.iterations;
    const auto& ys = pair.source_labels.values();
    const auto ns = prep.source.rows();
    const auto nt = prep.target.rows();

    MatrixXd features(ns + nt, prep.source.cols());
    features << prep.source, prep.target;

    const KMeansOptions km_options{config.kmeans_max_iters, config.kmeans_tol};
    const ObjectiveOptions obj_options{config.include_unselected_in_m0};
    const ComposeOptions compose_options{config.components, config.legacy_beta_prefactor};

    // Bootstrap: nearest-source-center labels in the untransformed space. This is the
    // combined distribution at t = 0 (p = p_s), whose quota selects no target sample.
    PseudoLabelTable table;
    MatrixXd target_centers;
    try {
        const auto protos = fit_prototypes(prep.source, ys, num_classes);
        const MatrixXd p_source = source_probabilities(protos, prep.target);
        table = make_pseudo_label_table(p_source, p_source, 0.0);
        target_centers = protos.centers;
    } catch (const Error& e) {
        rethrow_with_context(e, "bootstrap");
    }

    AdaptationResult result;
    for (int t = 1; t <= total; ++t) {
        try {
            const auto labeling = JointLabeling::from(ys, table.y, table.selected, num_classes);
            const auto parts = build_objectives(labeling, obj_options);
            const MatrixXd omega = compose_omega(parts, config.hp, compose_options);
            const auto sol = assemble_and_solve(features, omega, parts.centering, config.hp, config.subspace_dim);

            const MatrixXd projected = features * sol.projection;
            const double objective = (projected.transpose() * omega * projected).trace();
            if (!std::isfinite(objective)) throw NumericError("objective is not finite");
            if (!config.dump_dir.empty()) {
                dump_iteration(config.dump_dir, t, features, omega, parts.centering, config.hp, sol);
            }

            MatrixXd zs = projected.topRows(ns);
            MatrixXd zt = projected.bottomRows(nt);
            const auto protos = fit_prototypes(zs, ys, num_classes);
            const MatrixXd init = config.kmeans_warm_start && t > 1 ? target_centers : protos.centers;
            const auto km = target_kmeans(zt, init, km_options);
            target_centers = km.clusters.centers;
            auto next = combined_pseudo_labels(source_probabilities(protos, zt),
                                               softmax_neg_distance(center_distances(zt, km.clusters.centers)), t,
                                               total);
            const auto state = select(next, pseudo_label_counts(next, num_classes), t, total);
            apply_selection(state, next);

            IterationRecord record;
            record.t = t;
            record.objective = objective;
            record.eig_residual = sol.residual;
            record.selected_per_class = state.quota;
            record.selected_total = state.selected_ids.size();
            for (auto c : state.consistent_count) record.consistent_total += c;
            std::size_t same = 0;
            for (std::size_t i = 0; i < next.size(); ++i) same += next.y[i] == table.y[i] ? 1 : 0;
            record.label_agreement = static_cast<double>(same) / static_cast<double>(next.size());
            record.kmeans_iterations = km.iterations;
            record.skipped_terms = parts.report.skipped.size();
            record.pseudo_errors = evaluate_cross_domain_errors(zs, ys, zt, next.y, num_classes);

            table = std::move(next);
            if (observer) observer(IterationView{t, sol.projection, zs, zt, table}, record);
            result.iterations.push_back(std::move(record));

            if (t == total) {
                result.projection = sol.projection;
                result.theta = sol.theta;
                result.projected_source = std::move(zs);
                result.projected_target = std::move(zt);
            }
        } catch (const Error& e) {
            rethrow_with_context(e, "iteration " + std::to_string(t));
        }
    }
    result.predictions = table.y;
    result.final_labels = std::move(table);
    return result;
}

CrossDomainErrors evaluate_cross_domain_errors(const MatrixXd& projected_source, std::span<const int> source_labels,
                                               const MatrixXd& projected_target, std::span<const int> target_labels,
                                               int num_classes) {
    const auto fs = partial_prototypes(projected_source, source_labels, num_classes);
    const auto ft = partial_prototypes(projected_target, target_labels, num_classes);
    CrossDomainErrors e;
    e.source_by_source = error_rate(fs, projected_source, source_labels);
    e.target_by_target = error_rate(ft, projected_target, target_labels);
    e.source_by_target = error_rate(ft, projected_source, source_labels);
    e.target_by_source = error_rate(fs, projected_target, target_labels);
    return e;
}

CrossDomainErrors evaluate_cross_domain_errors(const MatrixXd& projection, const MatrixXd& source,
                                               std::span<const int> source_labels, const MatrixXd& target,
                                               std::span<const int> target_labels, int num_classes) {
    return evaluate_cross_domain_errors(source * projection, source_labels, target * projection, target_labels,
                                        num_classes);
}

double accuracy_percent(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw InternalError("prediction and truth lengths differ");
    if (truth.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i] ? 1 : 0;
    return 100.0 * static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace cdem
