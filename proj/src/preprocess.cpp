#include "cdem/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "cdem/errors.hpp"

namespace cdem {

void canonicalize_signs(Eigen::MatrixXd& columns) {
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < columns.rows(); ++i) {
            if (std::abs(columns(i, j)) > best) {
                best = std::abs(columns(i, j));
                arg = i;
            }
        }
        if (columns(arg, j) < 0.0) columns.col(j) *= -1.0;
    }
}

PcaModel fit_pca(const FeatureMatrix& features, int m) {
    const Eigen::Index n = features.rows();
    const Eigen::Index d = features.cols();
    if (m < 1 || m > std::min(n, d)) {
        throw ConfigError("PCA dimension " + std::to_string(m) + " must lie in [1, min(n, d) = " +
                          std::to_string(std::min(n, d)) + "]");
    }
    PcaModel model;
    model.mean = features.values().colwise().mean().transpose();
    const Eigen::MatrixXd centered = features.values().rowwise() - model.mean.transpose();

    // Thin SVD of the centered data: right singular vectors are the principal directions.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) <= 0.0) {
        throw DataError("PCA input has zero variance");
    }
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    model.basis = svd.matrixV().leftCols(m);
    model.explained_variance = sigma.head(m).array().square() / denom;
    canonicalize_signs(model.basis);
    return model;
}

FeatureMatrix transform(const PcaModel& model, const FeatureMatrix& features) {
    if (features.cols() != model.input_dim()) {
        throw ConfigError("PCA model expects dimension " + std::to_string(model.input_dim()) + ", got " +
                          std::to_string(features.cols()));
    }
    Eigen::MatrixXd out = (features.values().rowwise() - model.mean.transpose()) * model.basis;
    return FeatureMatrix(std::move(out));
}

FeatureMatrix normalize_rows(const FeatureMatrix& features) {
    Eigen::MatrixXd out = features.values();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm == 0.0) throw DataError("row " + std::to_string(i) + " is all zero and cannot be normalized");
        out.row(i) /= norm;
    }
    return FeatureMatrix(std::move(out));
}

void save_pca(const PcaModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_matrix(Eigen::MatrixXd(model.mean.transpose()), dir / "mean.cdm");
    write_matrix(model.basis, dir / "basis.cdm");
    write_matrix(Eigen::MatrixXd(model.explained_variance.transpose()), dir / "variance.cdm");
}

PcaModel load_pca(const std::filesystem::path& dir) {
    PcaModel model;
    model.mean = read_matrix(dir / "mean.cdm").values().row(0).transpose();
    model.basis = read_matrix(dir / "basis.cdm").values();
    model.explained_variance = read_matrix(dir / "variance.cdm").values().row(0).transpose();
    if (model.mean.size() != model.basis.rows() || model.explained_variance.size() != model.basis.cols()) {
        throw FormatError("inconsistent PCA model files in " + dir.string());
    }
    return model;
}

}  // namespace cdem
