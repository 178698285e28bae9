#pragma once

#include <Eigen/Core>

#include "cdem/config.hpp"

namespace cdem {

/// k smallest generalized eigenpairs of (A, B + shift I).
struct TransformSolution {
    Eigen::MatrixXd projection;  // m x k, B-orthonormal columns
    Eigen::VectorXd theta;       // ascending
    double residual = 0.0;       // max_i ||A p_i - theta_i B p_i|| / (||A||_F + |theta_i| ||B||_F)
    double b_shift = 0.0;
};

/// Solves A p = theta (B + b_shift I) p for the k algebraically smallest theta by Cholesky
/// reduction to a standard symmetric problem. Each eigenvector's largest-magnitude entry is
/// made positive. Throws NumericError when the shifted B is not positive definite and
/// ConfigError when k is outside [1, m].
TransformSolution solve_generalized(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int k, double b_shift);

/// Ridge added to X H X^T: 1e-9 * tr(B) / m.
double default_b_shift(const Eigen::MatrixXd& B);

/// Forms A = F^T Omega F + delta I and B = F^T H F from the joint samples F (n x m, one sample
/// per row) and solves for the k smallest pairs.
TransformSolution assemble_and_solve(const Eigen::MatrixXd& features, const Eigen::MatrixXd& omega,
                                     const Eigen::MatrixXd& centering, const Hyperparams& hp, int k);

}  // namespace cdem
