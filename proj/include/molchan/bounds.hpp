#pragma once

#include <cstdint>
#include <span>

#include "molchan/types.hpp"

namespace molchan {

struct FisherMatrix {
    Eigen::MatrixXd entries;
};

/// I(c) = sum_k s_k s_k^T / (c^T s_k). Throws DomainError if some c^T s_k = 0.
FisherMatrix fisher_matrix(const Cir& cir, const TrainingSequence& seq);

/// tr{ I(c)^-1 }, the CR lower bound on the total squared error of unbiased
/// estimators. Throws SingularDesignError ("singular Fisher matrix") when
/// I(c) is not invertible.
double cr_bound(const Cir& cir, const TrainingSequence& seq);

/// Expected squared error of the unconstrained LSSE estimate averaged over
/// Poisson observations and the CIR prior with mean `mean_cir`:
///   tr{ S (S^T S)^-2 S^T diag(S mu) }.
/// Throws SingularDesignError when S^T S is singular.
double lsse_error_upper_bound(const TrainingSequence& seq, const Cir& mean_cir);

/// Normalized error mean and variance. Plain ratios; see to_db for reporting.
struct ErrorStats {
    double normalized_mean = 0.0;
    double normalized_var = 0.0;
    std::int64_t num_trials = 0;
};

/// 10 log10(x); -inf for x == 0.
double to_db(double ratio);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    void merge(const CompensatedSum& other);
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// Single-pass accumulator behind error_stats. Merging partial accumulators in
/// a fixed order gives a deterministic result.
class ErrorAccumulator {
public:
    explicit ErrorAccumulator(int num_params = 0);

    void add(const Cir& estimate, const Cir& truth);
    void add(const Eigen::Ref<const Eigen::VectorXd>& estimate, const Eigen::Ref<const Eigen::VectorXd>& truth);
    void merge(const ErrorAccumulator& other);

    std::int64_t count() const { return count_; }
    Eigen::VectorXd mean_error() const;
    Eigen::VectorXd mean_truth() const;
    double mean_squared_error() const;

    /// Throws DomainError when no trials were added or the mean truth is zero.
    ErrorStats finish() const;

private:
    std::vector<CompensatedSum> error_sum_;
    std::vector<CompensatedSum> truth_sum_;
    CompensatedSum squared_error_sum_;
    std::int64_t count_ = 0;
};

/// With e_i = estimate_i - truth_i:
///   mean = ||avg e||^2 / ||avg c||^2,  var = (avg ||e||^2 - ||avg e||^2) / ||avg c||^2.
ErrorStats error_stats(std::span<const Cir> estimates, std::span<const Cir> truths);

}  // namespace molchan
