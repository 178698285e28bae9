#include "cdem/eigsolve.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cdem/errors.hpp"
#include "cdem/preprocess.hpp"

namespace cdem {

using Eigen::MatrixXd;

double default_b_shift(const MatrixXd& B) {
    return 1e-9 * B.trace() / static_cast<double>(B.rows());
}

TransformSolution solve_generalized(const MatrixXd& A, const MatrixXd& B, int k, double b_shift) {
    const Eigen::Index m = A.rows();
    if (A.cols() != m || B.rows() != m || B.cols() != m) {
        throw InternalError("generalized eigenproblem needs square matrices of equal size");
    }
    if (k < 1 || k > m) {
        throw ConfigError("subspace dimension " + std::to_string(k) + " outside [1, " + std::to_string(m) + "]");
    }
    const MatrixXd a = 0.5 * (A + A.transpose());
    MatrixXd b = 0.5 * (B + B.transpose());
    b.diagonal().array() += b_shift;

    Eigen::LLT<MatrixXd> chol(b);
    if (chol.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "B + " << b_shift << " I is not positive definite; try a shift above "
            << std::max(10.0 * std::abs(b_shift), 1e-8 * b.trace() / static_cast<double>(m));
        throw NumericError(msg.str());
    }
    // C = L^-1 A L^-T, then P = L^-T V.
    const auto lower = chol.matrixL();
    MatrixXd c = lower.solve(a);
    c = lower.solve(c.transpose()).transpose();
    c = 0.5 * (c + c.transpose());

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c);
    if (eig.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");

    TransformSolution sol;
    sol.b_shift = b_shift;
    sol.theta = eig.eigenvalues().head(k);
    sol.projection = chol.matrixU().solve(eig.eigenvectors().leftCols(k));
    canonicalize_signs(sol.projection);

    const double a_norm = a.norm();
    const double b_norm = b.norm();
    for (int i = 0; i < k; ++i) {
        const auto p = sol.projection.col(i);
        const double r = (a * p - sol.theta(i) * (b * p)).norm();
        const double scale = a_norm + std::abs(sol.theta(i)) * b_norm;
        sol.residual = std::max(sol.residual, scale > 0.0 ? r / scale : r);
    }
    return sol;
}

TransformSolution assemble_and_solve(const MatrixXd& features, const MatrixXd& omega, const MatrixXd& centering,
                                     const Hyperparams& hp, int k) {
    const Eigen::Index n = features.rows();
    if (omega.rows() != n || omega.cols() != n || centering.rows() != n || centering.cols() != n) {
        throw InternalError("objective matrices do not match the joint sample count");
    }
    if (!(hp.delta >= 0.0)) throw ConfigError("delta must be nonnegative");
    MatrixXd a = features.transpose() * (omega * features);
    a.diagonal().array() += hp.delta;
    const MatrixXd b = features.transpose() * (centering * features);
    return solve_generalized(a, b, k, default_b_shift(b));
}

}  // namespace cdem
