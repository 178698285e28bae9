#include "cdem/objectives.hpp"

#include "cdem/errors.hpp"

namespace cdem {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Participating sample indices of one domain, grouped by class.
struct DomainGroups {
    std::vector<std::size_t> members;
    std::vector<std::vector<std::size_t>> by_class;

    std::size_t count(int c) const { return by_class[static_cast<std::size_t>(c)].size(); }
    std::size_t complement(int c) const { return members.size() - count(c); }
};

DomainGroups group(const JointLabeling& labeling, std::size_t begin, std::size_t end) {
    DomainGroups g;
    g.by_class.resize(static_cast<std::size_t>(labeling.num_classes));
    for (std::size_t i = begin; i < end; ++i) {
        if (!labeling.participates(i)) continue;
        g.members.push_back(i);
        g.by_class[static_cast<std::size_t>(labeling.labels[i])].push_back(i);
    }
    return g;
}

DomainGroups source_groups(const JointLabeling& l) { return group(l, 0, l.n_source); }
DomainGroups target_groups(const JointLabeling& l) { return group(l, l.n_source, l.size()); }

void fill(VectorXd& v, const std::vector<std::size_t>& idx, double value) {
    for (auto i : idx) v(static_cast<Eigen::Index>(i)) = value;
}

/// v with value `inside` on class c members and `outside` on the rest of the domain.
VectorXd class_vs_rest(std::size_t n, const DomainGroups& g, int c, double inside, double outside) {
    VectorXd v = VectorXd::Zero(static_cast<Eigen::Index>(n));
    fill(v, g.members, outside);
    fill(v, g.by_class[static_cast<std::size_t>(c)], inside);
    return v;
}

void add_outer(MatrixXd& m, const VectorXd& v, double weight) {
    m.noalias() += weight * v * v.transpose();
}

void note(BuildReport* report, std::string message) {
    if (report) report->skipped.push_back(std::move(message));
}

MatrixXd zeros(std::size_t n) {
    return MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

}  // namespace

void JointLabeling::validate() const {
    if (num_classes < 1) throw InternalError("labeling needs at least one class");
    if (n_source > labels.size()) throw InternalError("labeling shorter than its source block");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y == kUnselected && i >= n_source) continue;
        if (y < 0 || y >= num_classes) {
            throw InternalError("labeling entry " + std::to_string(i) + " has invalid label " + std::to_string(y));
        }
    }
}

JointLabeling JointLabeling::from(const std::vector<int>& source_labels, const std::vector<int>& target_labels,
                                  const std::vector<bool>& target_selected, int num_classes) {
    if (target_labels.size() != target_selected.size()) {
        throw InternalError("target labels and selection flags differ in length");
    }
    JointLabeling out;
    out.n_source = source_labels.size();
    out.num_classes = num_classes;
    out.labels = source_labels;
    out.labels.reserve(source_labels.size() + target_labels.size());
    for (std::size_t j = 0; j < target_labels.size(); ++j) {
        out.labels.push_back(target_selected[j] ? target_labels[j] : kUnselected);
    }
    out.validate();
    return out;
}

MatrixXd build_label_projection(const JointLabeling& labeling) {
    labeling.validate();
    const std::size_t n = labeling.size();
    MatrixXd q = zeros(n);
    for (const auto& g : {source_groups(labeling), target_groups(labeling)}) {
        for (auto i : g.members) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        for (const auto& members : g.by_class) {
            if (members.empty()) continue;
            const double share = 1.0 / static_cast<double>(members.size());
            for (auto i : members)
                for (auto j : members) q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= share;
        }
    }
    return q;
}

MatrixXd build_complement_matrices(const JointLabeling& labeling, BuildReport* report) {
    labeling.validate();
    const std::size_t n = labeling.size();
    MatrixXd out = zeros(n);
    const auto src = source_groups(labeling);
    const auto tgt = target_groups(labeling);
    for (int c = 0; c < labeling.num_classes; ++c) {
        if (src.count(c) > 0) {
            if (src.complement(c) == 0) {
                throw ConfigError("source domain holds a single class; complement centers are undefined");
            }
            const double nc = static_cast<double>(src.count(c));
            const double nstar = static_cast<double>(src.complement(c));
            add_outer(out, class_vs_rest(n, src, c, 1.0 / nc, -1.0 / nstar), nc);
        }
        if (tgt.count(c) == 0) {
            note(report, "complement: class " + std::to_string(c) + " has no selected target samples");
        } else if (tgt.complement(c) == 0) {
            note(report, "complement: selected targets hold only class " + std::to_string(c));
        } else {
            const double nc = static_cast<double>(tgt.count(c));
            const double nstar = static_cast<double>(tgt.complement(c));
            add_outer(out, class_vs_rest(n, tgt, c, 1.0 / nc, -1.0 / nstar), nc);
        }
    }
    return out;
}

MatrixXd build_marginal_mmd(const JointLabeling& labeling, bool include_unselected_targets) {
    labeling.validate();
    const std::size_t n = labeling.size();
    std::size_t nt = 0;
    for (std::size_t i = labeling.n_source; i < n; ++i) {
        if (include_unselected_targets || labeling.participates(i)) ++nt;
    }
    if (labeling.n_source == 0 || nt == 0) {
        throw InternalError("marginal alignment needs at least one source and one target sample");
    }
    VectorXd v = VectorXd::Zero(static_cast<Eigen::Index>(n));
    v.head(static_cast<Eigen::Index>(labeling.n_source)).setConstant(1.0 / static_cast<double>(labeling.n_source));
    for (std::size_t i = labeling.n_source; i < n; ++i) {
        if (include_unselected_targets || labeling.participates(i)) {
            v(static_cast<Eigen::Index>(i)) = -1.0 / static_cast<double>(nt);
        }
    }
    return v * v.transpose();
}

MatrixXd build_conditional_mmd(const JointLabeling& labeling, bool class_weighted, BuildReport* report) {
    labeling.validate();
    const std::size_t n = labeling.size();
    MatrixXd out = zeros(n);
    const auto src = source_groups(labeling);
    const auto tgt = target_groups(labeling);
    for (int c = 0; c < labeling.num_classes; ++c) {
        const std::size_t ns = src.count(c);
        const std::size_t nt = tgt.count(c);
        if (ns == 0 || nt == 0) {
            note(report, "conditional mmd: class " + std::to_string(c) + " missing on one side");
            continue;
        }
        VectorXd v = VectorXd::Zero(static_cast<Eigen::Index>(n));
        fill(v, src.by_class[static_cast<std::size_t>(c)], 1.0 / static_cast<double>(ns));
        fill(v, tgt.by_class[static_cast<std::size_t>(c)], -1.0 / static_cast<double>(nt));
        add_outer(out, v, class_weighted ? static_cast<double>(ns + nt) : 1.0);
    }
    return out;
}

MatrixXd build_mmd(const JointLabeling& labeling, bool include_unselected_targets, BuildReport* report) {
    MatrixXd m = build_marginal_mmd(labeling, include_unselected_targets);
    m += build_conditional_mmd(labeling, false, report);
    return m;
}

std::pair<MatrixXd, MatrixXd> build_cross_domain(const JointLabeling& labeling, BuildReport* report) {
    labeling.validate();
    const std::size_t n = labeling.size();
    MatrixXd st = zeros(n);
    MatrixXd ts = zeros(n);
    const auto src = source_groups(labeling);
    const auto tgt = target_groups(labeling);
    for (int c = 0; c < labeling.num_classes; ++c) {
        const std::size_t ns = src.count(c);
        const std::size_t nt = tgt.count(c);
        if (ns == 0 || nt == 0) {
            note(report, "cross-domain: class " + std::to_string(c) + " missing on one side");
            continue;
        }
        const auto& src_c = src.by_class[static_cast<std::size_t>(c)];
        const auto& tgt_c = tgt.by_class[static_cast<std::size_t>(c)];

        // Source class center against the target complement center.
        if (tgt.complement(c) == 0) {
            note(report, "cross-domain: selected targets hold only class " + std::to_string(c));
        } else {
            VectorXd u = class_vs_rest(n, tgt, c, 0.0, -1.0 / static_cast<double>(tgt.complement(c)));
            fill(u, src_c, 1.0 / static_cast<double>(ns));
            add_outer(st, u, static_cast<double>(ns));
        }
        // Target class center against the source complement center.
        if (src.complement(c) == 0) {
            note(report, "cross-domain: source holds only class " + std::to_string(c));
        } else {
            VectorXd w = class_vs_rest(n, src, c, 0.0, -1.0 / static_cast<double>(src.complement(c)));
            fill(w, tgt_c, 1.0 / static_cast<double>(nt));
            add_outer(ts, w, static_cast<double>(nt));
        }
    }
    return {std::move(st), std::move(ts)};
}

LaplacianParts build_laplacian(const JointLabeling& labeling) {
    labeling.validate();
    const std::size_t n = labeling.size();
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(labeling.num_classes));
    for (std::size_t i = 0; i < n; ++i) {
        if (labeling.participates(i)) by_class[static_cast<std::size_t>(labeling.labels[i])].push_back(i);
    }
    LaplacianParts parts{zeros(n), zeros(n)};
    for (const auto& members : by_class) {
        for (auto i : members) {
            for (auto j : members) parts.similarity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
        }
    }
    parts.laplacian = -parts.similarity;
    parts.laplacian.diagonal() += parts.similarity.rowwise().sum();
    return parts;
}

MatrixXd build_centering(std::size_t n) {
    const auto size = static_cast<Eigen::Index>(n);
    MatrixXd h = MatrixXd::Identity(size, size);
    h.array() -= 1.0 / static_cast<double>(n);
    return h;
}

ObjectiveMatrices build_objectives(const JointLabeling& labeling, const ObjectiveOptions& options) {
    ObjectiveMatrices out;
    out.label_projection = build_label_projection(labeling);
    out.complement_sum = build_complement_matrices(labeling, &out.report);
    bool any_target = options.include_unselected_in_m0 && labeling.n_target() > 0;
    for (std::size_t i = labeling.n_source; i < labeling.size() && !any_target; ++i) {
        any_target = labeling.participates(i);
    }
    if (any_target) {
        out.mmd = build_mmd(labeling, options.include_unselected_in_m0, &out.report);
    } else {
        // Selected-only marginal alignment before anything is selected.
        note(&out.report, "marginal mmd: no selected target samples");
        out.mmd = build_conditional_mmd(labeling, false, &out.report);
    }
    auto [st, ts] = build_cross_domain(labeling, &out.report);
    out.cross_st = std::move(st);
    out.cross_ts = std::move(ts);
    auto lap = build_laplacian(labeling);
    out.similarity = std::move(lap.similarity);
    out.laplacian = std::move(lap.laplacian);
    out.centering = build_centering(labeling.size());
    return out;
}

MatrixXd compose_omega(const ObjectiveMatrices& parts, const Hyperparams& hp, const ComposeOptions& options) {
    const auto n = parts.label_projection.rows();
    for (const MatrixXd* m : {&parts.label_projection, &parts.complement_sum, &parts.mmd, &parts.cross_st,
                              &parts.cross_ts, &parts.laplacian}) {
        if (m->rows() != n || m->cols() != n) throw InternalError("objective matrices differ in size");
    }
    MatrixXd omega = MatrixXd::Zero(n, n);
    const auto& use = options.components;
    if (use.erm) {
        const double scale = options.legacy_beta_prefactor ? 1.0 - hp.beta : 1.0;
        omega += scale * parts.label_projection;
        omega -= scale * hp.beta * parts.complement_sum;
    }
    if (use.da) omega += hp.lambda * parts.mmd;
    if (use.dfl) omega += hp.eta * parts.laplacian;
    if (use.cde) omega -= hp.gamma * (parts.cross_st + parts.cross_ts);
    return omega;
}

MatrixXd cross_domain_error_matrix(const JointLabeling& labeling, double beta) {
    labeling.validate();
    const auto src = source_groups(labeling);
    const auto tgt = target_groups(labeling);
    for (int c = 0; c < labeling.num_classes; ++c) {
        if (src.count(c) == 0 || tgt.count(c) == 0 || src.complement(c) == 0 || tgt.complement(c) == 0) {
            throw DataError("cross-domain error needs every class and its complement on both sides (class " +
                            std::to_string(c) + ")");
        }
    }
    MatrixXd out = (1.0 - beta) * build_label_projection(labeling);
    out += build_conditional_mmd(labeling, true);
    auto [st, ts] = build_cross_domain(labeling);
    out -= beta * (st + ts);
    return out;
}

}  // namespace cdem
