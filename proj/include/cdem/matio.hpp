#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cdem {

struct ExperimentConfig;

/// Dense real matrix of sample features, one sample per row.
/// Construction validates n >= 1, d >= 1 and that every entry is finite.
class FeatureMatrix {
public:
    explicit FeatureMatrix(Eigen::MatrixXd values);

    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index cols() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }

private:
    Eigen::MatrixXd values_;
};

/// Class ids in [0, num_classes), num_classes >= 2.
class LabelVector {
public:
    LabelVector(std::vector<int> labels, int num_classes);

    std::size_t size() const { return labels_.size(); }
    int num_classes() const { return num_classes_; }
    int operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<int>& values() const { return labels_; }

    /// Number of samples carrying each class id.
    std::vector<std::size_t> class_counts() const;

private:
    std::vector<int> labels_;
    int num_classes_;
};

/// Labeled source domain plus unlabeled target domain sharing a feature space.
struct DomainPair {
    FeatureMatrix source;
    LabelVector source_labels;
    FeatureMatrix target;
    std::vector<std::size_t> source_class_counts;

    int num_classes() const { return source_labels.num_classes(); }
    Eigen::Index source_size() const { return source.rows(); }
    Eigen::Index target_size() const { return target.rows(); }
};

/// Validates the pair invariants (equal dims, label count, every class present in the source).
DomainPair make_domain_pair(FeatureMatrix source, LabelVector source_labels, FeatureMatrix target);

/// Reads a CDEM-MAT v1 file, or a CSV file when the magic bytes are absent.
FeatureMatrix read_matrix(const std::filesystem::path& path);

/// Writes CSV when the extension is ".csv", CDEM-MAT v1 otherwise. Both round-trip bit-exactly.
void write_matrix(const Eigen::MatrixXd& matrix, const std::filesystem::path& path);
void write_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path);

FeatureMatrix decode_matrix(std::span<const char> bytes);
std::vector<char> encode_matrix(const Eigen::MatrixXd& matrix);

/// One decimal integer per line. When num_classes is absent it is inferred as max + 1.
LabelVector read_labels(const std::filesystem::path& path, std::optional<int> num_classes = std::nullopt);
void write_labels(const std::vector<int>& labels, const std::filesystem::path& path);

/// Loads source features/labels and target features named in the config.
DomainPair load_domain_pair(const ExperimentConfig& config);

/// Target labels for evaluation only; nullopt when the config names none.
std::optional<LabelVector> load_target_labels(const ExperimentConfig& config, int num_classes);

}  // namespace cdem
