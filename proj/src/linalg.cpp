#include "molchan/linalg.hpp"

#include <cmath>
#include <string>

#include "molchan/error.hpp"

namespace molchan::linalg {

EigenRange eigen_range(const Eigen::MatrixXd& symmetric)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd values = solver.eigenvalues();
    EigenRange range;
    range.min_abs = values.cwiseAbs().minCoeff();
    range.max_abs = values.cwiseAbs().maxCoeff();
    range.min_value = values.minCoeff();
    return range;
}

bool well_conditioned(const Eigen::MatrixXd& symmetric, double max_condition)
{
    if (symmetric.rows() == 0) return false;
    const EigenRange range = eigen_range(symmetric);
    return range.min_value > 0.0 && range.max_abs <= max_condition * range.min_value;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& symmetric, std::string_view what)
{
    if (!well_conditioned(symmetric)) throw SingularDesignError(std::string(what));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(symmetric);
    return ldlt.solve(Eigen::MatrixXd::Identity(symmetric.rows(), symmetric.cols()));
}

Eigen::MatrixXd least_squares_filter(const Eigen::MatrixXd& design)
{
    const Eigen::MatrixXd gram = design.transpose() * design;
    if (!well_conditioned(gram)) throw SingularDesignError("singular design matrix");
    return gram.ldlt().solve(design.transpose());
}

}  // namespace molchan::linalg
