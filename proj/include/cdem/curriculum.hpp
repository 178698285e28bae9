#pragma once

#include <cstddef>
#include <vector>

#include "cdem/prototype.hpp"

namespace cdem {

struct CurriculumState {
    int t = 0;
    int total = 0;
    std::vector<std::size_t> quota;           // N_{t,c}
    std::vector<std::size_t> consistent_count;  // label-consistent samples with pseudo label c
    std::vector<std::size_t> selected_ids;    // ascending target indices
};

/// Quota min(ceil(n_tc * t / T), n_con) in exact integer arithmetic.
std::size_t class_quota(std::size_t class_count, std::size_t consistent_count, int t, int total);

/// Picks, per class c, the quota-many label-consistent samples with pseudo label c and the
/// highest confidence (ties: lower index first). class_counts[c] is the number of targets
/// whose pseudo label is c.
CurriculumState select(const PseudoLabelTable& table, const std::vector<std::size_t>& class_counts, int t, int total);

/// Per-class counts of table.y.
std::vector<std::size_t> pseudo_label_counts(const PseudoLabelTable& table, int num_classes);

/// Writes the selection flags of `state` into `table`.
void apply_selection(const CurriculumState& state, PseudoLabelTable& table);

}  // namespace cdem
