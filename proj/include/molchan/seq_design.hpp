#pragma once

#include <cstdint>

#include "molchan/types.hpp"

namespace molchan {

/// Eigenvalue guard for admissible designs.
inline constexpr double kDesignEpsilon = 1e-9;

/// Largest K accepted by the exhaustive search.
inline constexpr int kMaxSearchLength = 24;

/// s[k] = 1 iff (k - k0) is a multiple of L + 1, for k = 1..K.
/// Requires 1 <= k0 <= L + 1 and K >= 2L.
TrainingSequence isi_free_sequence(int length, int num_taps, int k0 = 1);

struct DesignCriterionValue {
    /// +inf when inadmissible.
    double objective = 0.0;
    double min_abs_eigenvalue = 0.0;
    bool admissible = false;
};

/// Expected unconstrained-LSSE error of `seq` under prior mean `mean_cir`,
/// with sequences whose S^T S has an eigenvalue of magnitude <= epsilon
/// marked inadmissible.
DesignCriterionValue design_objective(const TrainingSequence& seq, const Cir& mean_cir,
                                      double epsilon = kDesignEpsilon);

struct SearchResult {
    TrainingSequence sequence;
    DesignCriterionValue value;
    std::uint64_t admissible_count = 0;
};

/// Exhaustive search over all 2^K binary sequences for the admissible one with
/// the smallest design objective. Among equal objectives the lexicographically
/// smallest sequence wins. The result does not depend on `workers`
/// (0 = MOLCHAN_THREADS / hardware concurrency).
///
/// Throws ArgumentError for K > 24 or K < 2L, SearchFailure when nothing is admissible.
SearchResult search_optimal_sequence(int length, int num_taps, const Cir& mean_cir,
                                     double epsilon = kDesignEpsilon, unsigned workers = 0);

}  // namespace molchan
