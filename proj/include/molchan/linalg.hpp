#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace molchan::linalg {

/// Symmetric matrices whose eigenvalue ratio exceeds this are treated as singular.
inline constexpr double kMaxCondition = 1e12;

/// min |lambda| and max |lambda| of a symmetric matrix.
struct EigenRange {
    double min_abs = 0.0;
    double max_abs = 0.0;
    double min_value = 0.0;
};

EigenRange eigen_range(const Eigen::MatrixXd& symmetric);

/// True when `symmetric` is positive definite with condition number <= max_condition.
bool well_conditioned(const Eigen::MatrixXd& symmetric, double max_condition = kMaxCondition);

/// Inverse of a symmetric positive definite matrix. Throws SingularDesignError
/// (prefixed with `what`) when it is not well conditioned.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& symmetric, std::string_view what);

/// Least-squares filter (S^T S)^-1 S^T for a full-column-rank design S.
Eigen::MatrixXd least_squares_filter(const Eigen::MatrixXd& design);

}  // namespace molchan::linalg
