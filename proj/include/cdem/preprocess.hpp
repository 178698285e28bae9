#pragma once

#include <filesystem>

#include <Eigen/Core>

#include "cdem/matio.hpp"

namespace cdem {

/// Principal subspace of a data set. basis is d x m with orthonormal columns ordered by
/// decreasing explained variance; each column's largest-magnitude entry is positive.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd basis;
    Eigen::VectorXd explained_variance;

    Eigen::Index input_dim() const { return basis.rows(); }
    Eigen::Index output_dim() const { return basis.cols(); }
};

PcaModel fit_pca(const FeatureMatrix& features, int m);

/// Centers with the model mean and projects onto the basis (n x m result).
FeatureMatrix transform(const PcaModel& model, const FeatureMatrix& features);

/// Scales every row to unit L2 norm. A zero row is a DataError.
FeatureMatrix normalize_rows(const FeatureMatrix& features);

/// Flips each column so that its largest-magnitude entry (first on ties) is positive.
void canonicalize_signs(Eigen::MatrixXd& columns);

/// mean.cdm (1 x d), basis.cdm (d x m), variance.cdm (1 x m) inside dir.
void save_pca(const PcaModel& model, const std::filesystem::path& dir);
PcaModel load_pca(const std::filesystem::path& dir);

}  // namespace cdem
