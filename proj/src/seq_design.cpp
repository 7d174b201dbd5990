#include "molchan/seq_design.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "molchan/error.hpp"
#include "molchan/parallel.hpp"

namespace molchan {

namespace {

// Objective via the eigendecomposition S^T S = V diag(lambda) V^T:
// tr{(S^T S)^-2 S^T diag(S mu) S} = sum_i lambda_i^-2 v_i^T W v_i.
DesignCriterionValue evaluate_design(const Eigen::MatrixXd& design, const Eigen::VectorXd& mu, double epsilon)
{
    const Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    const Eigen::VectorXd& lambda = solver.eigenvalues();

    DesignCriterionValue value;
    value.min_abs_eigenvalue = lambda.cwiseAbs().minCoeff();
    value.admissible = value.min_abs_eigenvalue > epsilon;
    if (!value.admissible) {
        value.objective = std::numeric_limits<double>::infinity();
        return value;
    }
    const Eigen::VectorXd variances = design * mu;
    const Eigen::MatrixXd weighted = design.transpose() * variances.asDiagonal() * design;
    const Eigen::MatrixXd& v = solver.eigenvectors();
    double objective = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        objective += v.col(i).dot(weighted * v.col(i)) / (lambda(i) * lambda(i));
    value.objective = objective;
    return value;
}

TrainingSequence decode(std::uint64_t code, int length)
{
    std::vector<std::uint8_t> symbols(static_cast<std::size_t>(length));
    for (int k = 1; k <= length; ++k) symbols[static_cast<std::size_t>(k - 1)] = (code >> (length - k)) & 1U;
    return TrainingSequence(std::move(symbols));
}

// Some tap column of S is identically zero.
bool structurally_singular(std::uint64_t code, int length, int taps)
{
    for (int l = 1; l <= taps; ++l) {
        // column l reads s[L-l+1 .. K-l+1]
        const int first = taps - l + 1;
        const int last = length - l + 1;
        bool any = false;
        for (int k = first; k <= last && !any; ++k) any = (code >> (length - k)) & 1U;
        if (!any) return true;
    }
    return false;
}

struct Best {
    std::optional<std::uint64_t> code;
    DesignCriterionValue value;
    std::uint64_t admissible = 0;

    // Total order on (objective, code), so the minimum is partition independent.
    void consider(std::uint64_t candidate, const DesignCriterionValue& v)
    {
        if (!code || v.objective < value.objective || (v.objective == value.objective && candidate < *code)) {
            code = candidate;
            value = v;
        }
    }

    void offer(std::uint64_t candidate, const DesignCriterionValue& v)
    {
        if (!v.admissible) return;
        ++admissible;
        consider(candidate, v);
    }
};

}  // namespace

TrainingSequence isi_free_sequence(int length, int num_taps, int k0)
{
    if (num_taps < 1) throw ArgumentError("number of taps must be at least 1");
    if (k0 < 1 || k0 > num_taps + 1) throw ArgumentError("k0 must lie in 1..L+1");
    if (length < 2 * num_taps) throw ArgumentError("sequence length must satisfy K >= 2L");
    std::vector<std::uint8_t> symbols(static_cast<std::size_t>(length));
    for (int k = 1; k <= length; ++k)
        symbols[static_cast<std::size_t>(k - 1)] = ((k - k0) % (num_taps + 1) == 0) ? 1 : 0;
    return TrainingSequence(std::move(symbols));
}

DesignCriterionValue design_objective(const TrainingSequence& seq, const Cir& mean_cir, double epsilon)
{
    if (!mean_cir.non_negative()) throw ArgumentError("prior mean CIR must be non-negative");
    return evaluate_design(design_matrix(seq, mean_cir.num_taps()), mean_cir.as_vector(), epsilon);
}

SearchResult search_optimal_sequence(int length, int num_taps, const Cir& mean_cir, double epsilon, unsigned workers)
{
    if (mean_cir.num_taps() != num_taps) throw ArgumentError("prior mean CIR has the wrong number of taps");
    if (!mean_cir.non_negative()) throw ArgumentError("prior mean CIR must be non-negative");
    if (length > kMaxSearchLength) throw ArgumentError("exhaustive search supports K <= 24");
    if (num_taps < 1 || length < 2 * num_taps) throw ArgumentError("sequence length must satisfy K >= 2L");

    const std::uint64_t total = std::uint64_t{1} << length;
    // Fixed partition so the reduction order never depends on the worker count.
    const std::uint64_t chunks = std::min<std::uint64_t>(total, 1024);
    std::vector<Best> partial(chunks);
    const Eigen::VectorXd mu = mean_cir.as_vector();
    const int rows = length - num_taps + 1;

    parallel_for(chunks, resolve_workers(workers), [&](std::size_t c) {
        const std::uint64_t begin = total * c / chunks;
        const std::uint64_t end = total * (c + 1) / chunks;
        Eigen::MatrixXd design(rows, num_taps + 1);
        Best& best = partial[c];
        for (std::uint64_t code = begin; code < end; ++code) {
            if (structurally_singular(code, length, num_taps)) continue;
            for (int i = 0; i < rows; ++i) {
                const int k = num_taps + i;
                for (int l = 1; l <= num_taps; ++l) design(i, l - 1) = static_cast<double>((code >> (length - (k - l + 1))) & 1U);
                design(i, num_taps) = 1.0;
            }
            best.offer(code, evaluate_design(design, mu, epsilon));
        }
    });

    Best overall;
    for (const Best& b : partial) {
        overall.admissible += b.admissible;
        if (b.code) overall.consider(*b.code, b.value);
    }
    if (!overall.code) throw SearchFailure("no admissible training sequence of length " + std::to_string(length));
    return {decode(*overall.code, length), overall.value, overall.admissible};
}

}  // namespace molchan
