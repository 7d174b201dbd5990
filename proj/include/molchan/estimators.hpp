#pragma once

#include <optional>
#include <string>
#include <vector>

#include "molchan/types.hpp"

namespace molchan {

struct EstimateReport {
    Cir cir_hat;
    /// Indices of the non-zero entries of cir_hat.
    ActiveSet active_set;
    /// g(c) for ML, ||r - S c||^2 for LSSE and ISI-free.
    double objective = 0.0;
    /// Newton iterations summed over all solved subsets (ML only).
    int solver_iterations = 0;
    int candidates_evaluated = 0;
    /// Subsets skipped as singular or without a finite stationary point.
    int subsets_skipped = 0;
};

/// Flat record: name,c_1,...,c_L,c_n,active_mask,objective,iterations
std::string to_record(const EstimateReport& report, std::string_view estimator);

/// Poisson log-likelihood up to a constant,
///   g(c) = sum_k [ -c^T s_k + r[k] ln(c^T s_k) ],
/// with 0 ln 0 = 0 and -inf when r[k] > 0 meets c^T s_k = 0.
double ml_loglikelihood(const Cir& cir, const TrainingSequence& seq, const ObservationVector& obs);

struct StationaryPoint {
    /// Values for the active parameters, in ActiveSet::indices() order. May be negative.
    Eigen::VectorXd values;
    int iterations = 0;
};

inline constexpr int kNewtonIterationCap = 200;

/// Solves sum_k [ r[k] / (c^T s_k) - 1 ] s_k = 0 over the active parameters by
/// damped Newton ascent on g. Converged when the gradient infinity-norm is at
/// most 1e-9 * (1 + max r). Returns zeros when every observation touching the
/// active set is zero.
///
/// Throws SingularDesignError when the restricted design (or its rows with
/// positive counts) is rank deficient, DomainError when a positive count has
/// no active parameter to explain it, NoConvergenceError past the iteration cap.
StationaryPoint solve_ml_stationary(const ActiveSet& active, const TrainingSequence& seq,
                                    const ObservationVector& obs);

/// (S_A^T S_A)^-1 S_A^T, so that c_A = F_A r. Throws SingularDesignError.
Eigen::MatrixXd lsse_filter_matrix(const ActiveSet& active, const TrainingSequence& seq);

/// Precomputed per-subset data for one training sequence; reused across trials.
class SubsetBank {
public:
    SubsetBank(const TrainingSequence& seq, int num_taps);

    struct Entry {
        ActiveSet active;
        std::vector<int> columns;
        Eigen::MatrixXd design;  // S restricted to `columns`
        std::optional<Eigen::MatrixXd> filter;  // empty when singular
    };

    int num_taps() const { return num_taps_; }
    int num_observations() const { return static_cast<int>(design_.rows()); }
    const Eigen::MatrixXd& design() const { return design_; }
    const TrainingSequence& sequence() const { return seq_; }
    /// Enumeration order: entries()[0] is the full set.
    const std::vector<Entry>& entries() const { return entries_; }

private:
    TrainingSequence seq_;
    int num_taps_;
    Eigen::MatrixXd design_;
    std::vector<Entry> entries_;
};

/// Constrained (c >= 0) ML estimator over all active subsets.
class MlEstimator {
public:
    MlEstimator(const TrainingSequence& seq, int num_taps);
    EstimateReport estimate(const ObservationVector& obs) const;
    const SubsetBank& bank() const { return bank_; }

private:
    SubsetBank bank_;
};

/// Constrained (c >= 0) least-sum-of-squared-errors estimator over all active subsets.
class LsseEstimator {
public:
    LsseEstimator(const TrainingSequence& seq, int num_taps);
    EstimateReport estimate(const ObservationVector& obs) const;

    /// (S^T S)^-1 S^T r without the non-negativity constraint.
    /// Throws SingularDesignError if S is rank deficient.
    Eigen::VectorXd unconstrained(const ObservationVector& obs) const;

    const SubsetBank& bank() const { return bank_; }

private:
    SubsetBank bank_;
};

EstimateReport estimate_ml(const TrainingSequence& seq, const ObservationVector& obs);
EstimateReport estimate_lsse(const TrainingSequence& seq, const ObservationVector& obs);

/// Estimator for ISI-free sequences: the noise mean is the average over the
/// noise-only samples, tap l the clamped average of (r[k] - c_n) over the
/// samples that see only the release l-1 intervals back. Only samples k >= L
/// are used. L is inferred from the sequence and observation lengths.
///
/// Throws ArgumentError if seq is not the ISI-free sequence for (L, k0) and
/// InsufficientDataError if an index set is empty.
EstimateReport estimate_isifree(const TrainingSequence& seq, const ObservationVector& obs, int k0);

/// True when seq equals isi_free_sequence(K, L, k0).
bool is_isi_free(const TrainingSequence& seq, int num_taps, int k0);

}  // namespace molchan
