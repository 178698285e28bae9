#include "cdem/curriculum.hpp"

#include <algorithm>

#include "cdem/errors.hpp"

namespace cdem {

std::size_t class_quota(std::size_t class_count, std::size_t consistent_count, int t, int total) {
    const auto tt = static_cast<std::size_t>(t);
    const auto big_t = static_cast<std::size_t>(total);
    const std::size_t growing = (class_count * tt + big_t - 1) / big_t;
    return std::min(growing, consistent_count);
}

CurriculumState select(const PseudoLabelTable& table, const std::vector<std::size_t>& class_counts, int t,
                       int total) {
    if (total < 1 || t < 1 || t > total) {
        throw ConfigError("iteration " + std::to_string(t) + " outside [1, " + std::to_string(total) + "]");
    }
    const auto num_classes = class_counts.size();
    CurriculumState state;
    state.t = t;
    state.total = total;
    state.quota.assign(num_classes, 0);
    state.consistent_count.assign(num_classes, 0);

    std::vector<std::vector<std::size_t>> pool(num_classes);
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!table.consistent[i]) continue;
        const auto c = static_cast<std::size_t>(table.y[i]);
        if (c >= num_classes) throw InternalError("pseudo label outside class range");
        pool[c].push_back(i);
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        auto& ids = pool[c];
        state.consistent_count[c] = ids.size();
        state.quota[c] = class_quota(class_counts[c], ids.size(), t, total);
        std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
            return table.confidence(static_cast<Eigen::Index>(a)) > table.confidence(static_cast<Eigen::Index>(b));
        });
        state.selected_ids.insert(state.selected_ids.end(), ids.begin(),
                                  ids.begin() + static_cast<std::ptrdiff_t>(state.quota[c]));
    }
    std::sort(state.selected_ids.begin(), state.selected_ids.end());
    return state;
}

std::vector<std::size_t> pseudo_label_counts(const PseudoLabelTable& table, int num_classes) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (int y : table.y) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

void apply_selection(const CurriculumState& state, PseudoLabelTable& table) {
    table.selected.assign(table.size(), false);
    for (auto i : state.selected_ids) table.selected[i] = true;
}

}  // namespace cdem
