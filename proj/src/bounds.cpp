#include "molchan/bounds.hpp"

#include <cmath>
#include <limits>

#include "molchan/error.hpp"
#include "molchan/linalg.hpp"

namespace molchan {

FisherMatrix fisher_matrix(const Cir& cir, const TrainingSequence& seq)
{
    if (!cir.non_negative()) throw ArgumentError("Fisher matrix requires a non-negative CIR");
    const Eigen::MatrixXd design = design_matrix(seq, cir.num_taps());
    const Eigen::VectorXd means = design * cir.as_vector();
    if (!(means.array() > 0.0).all())
        throw DomainError("Fisher matrix undefined: an observation has zero mean");
    Eigen::MatrixXd info = design.transpose() * means.cwiseInverse().asDiagonal() * design;
    return {0.5 * (info + info.transpose())};
}

double cr_bound(const Cir& cir, const TrainingSequence& seq)
{
    const FisherMatrix info = fisher_matrix(cir, seq);
    return linalg::spd_inverse(info.entries, "singular Fisher matrix").trace();
}

double lsse_error_upper_bound(const TrainingSequence& seq, const Cir& mean_cir)
{
    if (!mean_cir.non_negative()) throw ArgumentError("prior mean CIR must be non-negative");
    const Eigen::MatrixXd design = design_matrix(seq, mean_cir.num_taps());
    const Eigen::MatrixXd filter = linalg::least_squares_filter(design);
    const Eigen::VectorXd variances = design * mean_cir.as_vector();
    double bound = 0.0;
    for (Eigen::Index k = 0; k < design.rows(); ++k) bound += variances(k) * filter.col(k).squaredNorm();
    return bound;
}

double to_db(double ratio)
{
    if (ratio == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ratio);
}

void CompensatedSum::add(double x)
{
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        compensation_ += (sum_ - t) + x;
    else
        compensation_ += (x - t) + sum_;
    sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other)
{
    add(other.sum_);
    add(other.compensation_);
}

ErrorAccumulator::ErrorAccumulator(int num_params)
    : error_sum_(static_cast<std::size_t>(num_params)), truth_sum_(static_cast<std::size_t>(num_params))
{
}

void ErrorAccumulator::add(const Cir& estimate, const Cir& truth)
{
    add(estimate.as_vector(), truth.as_vector());
}

void ErrorAccumulator::add(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                           const Eigen::Ref<const Eigen::VectorXd>& truth)
{
    if (estimate.size() != truth.size()) throw ArgumentError("estimate and truth differ in dimension");
    if (error_sum_.empty()) {
        error_sum_.resize(static_cast<std::size_t>(truth.size()));
        truth_sum_.resize(static_cast<std::size_t>(truth.size()));
    }
    if (static_cast<std::size_t>(truth.size()) != error_sum_.size())
        throw ArgumentError("CIR dimension changed between trials");
    double squared = 0.0;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        const double e = estimate(i) - truth(i);
        error_sum_[static_cast<std::size_t>(i)].add(e);
        truth_sum_[static_cast<std::size_t>(i)].add(truth(i));
        squared += e * e;
    }
    squared_error_sum_.add(squared);
    ++count_;
}

void ErrorAccumulator::merge(const ErrorAccumulator& other)
{
    if (other.count_ == 0) return;
    if (error_sum_.empty()) {
        error_sum_.resize(other.error_sum_.size());
        truth_sum_.resize(other.truth_sum_.size());
    }
    if (other.error_sum_.size() != error_sum_.size()) throw ArgumentError("cannot merge accumulators of different dimension");
    for (std::size_t i = 0; i < error_sum_.size(); ++i) {
        error_sum_[i].merge(other.error_sum_[i]);
        truth_sum_[i].merge(other.truth_sum_[i]);
    }
    squared_error_sum_.merge(other.squared_error_sum_);
    count_ += other.count_;
}

Eigen::VectorXd ErrorAccumulator::mean_error() const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(error_sum_.size()));
    for (std::size_t i = 0; i < error_sum_.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = error_sum_[i].value() / static_cast<double>(count_);
    return v;
}

Eigen::VectorXd ErrorAccumulator::mean_truth() const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(truth_sum_.size()));
    for (std::size_t i = 0; i < truth_sum_.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = truth_sum_[i].value() / static_cast<double>(count_);
    return v;
}

double ErrorAccumulator::mean_squared_error() const
{
    return squared_error_sum_.value() / static_cast<double>(count_);
}

ErrorStats ErrorAccumulator::finish() const
{
    if (count_ < 1) throw DomainError("error statistics need at least one trial");
    const double truth_norm = mean_truth().squaredNorm();
    if (!(truth_norm > 0.0)) throw DomainError("error statistics undefined for a zero mean CIR");
    const Eigen::VectorXd mean_e = mean_error();
    double bias = 0.0;
    for (Eigen::Index i = 0; i < mean_e.size(); ++i) bias += mean_e(i) * mean_e(i);
    ErrorStats stats;
    stats.normalized_mean = bias / truth_norm;
    stats.normalized_var = std::max(0.0, mean_squared_error() - bias) / truth_norm;
    stats.num_trials = count_;
    return stats;
}

ErrorStats error_stats(std::span<const Cir> estimates, std::span<const Cir> truths)
{
    if (estimates.size() != truths.size()) throw ArgumentError("estimate and truth collections differ in size");
    ErrorAccumulator acc;
    for (std::size_t i = 0; i < estimates.size(); ++i) acc.add(estimates[i], truths[i]);
    return acc.finish();
}

}  // namespace molchan
