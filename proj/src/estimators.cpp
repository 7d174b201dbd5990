#include "molchan/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "molchan/error.hpp"
#include "molchan/linalg.hpp"

namespace molchan {

namespace {

constexpr double kDomainFloor = 1e-12;
constexpr double kInitFloor = 1e-3;
constexpr int kMaxHalvings = 60;

int positive_mod(int a, int m)
{
    const int r = a % m;
    return r < 0 ? r + m : r;
}

void check_observation_size(const ObservationVector& obs, Eigen::Index expected)
{
    if (obs.size() != expected)
        throw ArgumentError("expected " + std::to_string(expected) + " observations, got " +
                            std::to_string(obs.size()));
    for (auto c : obs.counts)
        if (c < 0) throw ArgumentError("observed counts must be non-negative");
}

// g restricted to the means mu = S c.
double loglik_from_means(const Eigen::VectorXd& means, const Eigen::VectorXd& r)
{
    double g = 0.0;
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        const double mu = means(k);
        if (r(k) > 0.0) {
            if (!(mu > 0.0)) return -std::numeric_limits<double>::infinity();
            g += -mu + r(k) * std::log(mu);
        } else {
            g -= mu;
        }
    }
    return g;
}

enum class SolveStatus { Ok, Singular, Domain, NoConvergence };

struct SolveOutcome {
    SolveStatus status = SolveStatus::Ok;
    Eigen::VectorXd values;
    int iterations = 0;
};

// Damped Newton ascent on g over the columns of `design`.
SolveOutcome solve_stationary(const Eigen::MatrixXd& design, const std::optional<Eigen::MatrixXd>& filter,
                              const Eigen::VectorXd& r, int num_params)
{
    SolveOutcome out;
    const Eigen::Index rows = design.rows();
    const Eigen::Index dim = design.cols();
    if (!filter) {
        out.status = SolveStatus::Singular;
        return out;
    }

    bool any_positive = false;
    bool any_zero_touching = false;
    for (Eigen::Index k = 0; k < rows; ++k) {
        const bool touches = design.row(k).sum() > 0.0;
        if (r(k) > 0.0) {
            if (!touches) {
                out.status = SolveStatus::Domain;
                return out;
            }
            any_positive = true;
        } else if (touches) {
            any_zero_touching = true;
        }
    }
    if (!any_positive) {
        out.values = Eigen::VectorXd::Zero(dim);
        return out;
    }
    if (any_zero_touching) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index k = 0; k < rows; ++k)
            if (r(k) > 0.0) gram.noalias() += design.row(k).transpose() * design.row(k);
        if (!linalg::well_conditioned(gram)) {
            out.status = SolveStatus::Singular;
            return out;
        }
    }

    Eigen::VectorXd x = (*filter * r).cwiseMax(kInitFloor);
    if (!x.allFinite()) x.setConstant(r.mean() / num_params);

    const double tolerance = 1e-9 * (1.0 + r.maxCoeff());
    Eigen::VectorXd means = design * x;
    for (int it = 0; it <= kNewtonIterationCap; ++it) {
        Eigen::VectorXd ratio(rows);
        Eigen::VectorXd weight(rows);
        double scale = 1.0;
        for (Eigen::Index k = 0; k < rows; ++k) {
            ratio(k) = r(k) > 0.0 ? r(k) / means(k) : 0.0;
            weight(k) = r(k) > 0.0 ? ratio(k) / means(k) : 0.0;
            scale += std::abs(means(k)) + (r(k) > 0.0 ? r(k) * std::abs(std::log(means(k))) : 0.0);
        }
        const Eigen::VectorXd gradient = design.transpose() * (ratio.array() - 1.0).matrix();
        if (gradient.lpNorm<Eigen::Infinity>() <= tolerance) {
            out.values = std::move(x);
            out.iterations = it;
            return out;
        }
        if (it == kNewtonIterationCap) break;

        const Eigen::MatrixXd hessian = design.transpose() * weight.asDiagonal() * design;
        Eigen::LLT<Eigen::MatrixXd> llt(hessian);
        if (llt.info() != Eigen::Success) {
            out.status = SolveStatus::Singular;
            return out;
        }
        const Eigen::VectorXd direction = llt.solve(gradient);
        const double predicted = 0.5 * gradient.dot(direction);
        const double g0 = loglik_from_means(means, r);
        const double resolution = 1e-13 * scale;

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings && !accepted; ++h, step *= 0.5) {
            Eigen::VectorXd candidate = x + step * direction;
            Eigen::VectorXd candidate_means = design * candidate;
            bool inside = true;
            for (Eigen::Index k = 0; k < rows && inside; ++k)
                if (r(k) > 0.0 && !(candidate_means(k) >= kDomainFloor)) inside = false;
            if (!inside) continue;
            if (loglik_from_means(candidate_means, r) >= g0 || step * predicted <= resolution) {
                x = std::move(candidate);
                means = std::move(candidate_means);
                accepted = true;
            }
        }
        if (!accepted) break;
    }
    out.status = SolveStatus::NoConvergence;
    return out;
}

Eigen::VectorXd embed(const SubsetBank::Entry& entry, const Eigen::VectorXd& values, int num_params)
{
    Eigen::VectorXd full = Eigen::VectorXd::Zero(num_params);
    for (std::size_t j = 0; j < entry.columns.size(); ++j) full(entry.columns[j]) = values(static_cast<Eigen::Index>(j));
    return full;
}

ActiveSet support_of(const Eigen::VectorXd& full, int num_taps)
{
    std::uint32_t mask = 0;
    for (Eigen::Index i = 0; i < full.size(); ++i)
        if (full(i) != 0.0) mask |= std::uint32_t{1} << i;
    return ActiveSet(mask, num_taps);
}

EstimateReport make_report(const Eigen::VectorXd& full, int num_taps, double objective)
{
    EstimateReport report;
    report.cir_hat = Cir::from_vector(full);
    report.active_set = support_of(full, num_taps);
    report.objective = objective;
    return report;
}

}  // namespace

std::string to_record(const EstimateReport& report, std::string_view estimator)
{
    std::string out(estimator);
    char buf[64];
    for (double c : report.cir_hat.as_vector()) {
        std::snprintf(buf, sizeof buf, ",%.17g", c);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%u,%.17g,%d", report.active_set.mask(), report.objective,
                  report.solver_iterations);
    return out + buf;
}

double ml_loglikelihood(const Cir& cir, const TrainingSequence& seq, const ObservationVector& obs)
{
    if (!cir.non_negative()) throw ArgumentError("log-likelihood requires a non-negative CIR");
    const Eigen::MatrixXd design = design_matrix(seq, cir.num_taps());
    check_observation_size(obs, design.rows());
    return loglik_from_means(design * cir.as_vector(), obs.as_vector());
}

StationaryPoint solve_ml_stationary(const ActiveSet& active, const TrainingSequence& seq,
                                    const ObservationVector& obs)
{
    const int taps = active.num_taps();
    if (active.size() == 0) throw ArgumentError("active set must be non-empty");
    const Eigen::MatrixXd design = restrict_columns(design_matrix(seq, taps), active);
    check_observation_size(obs, design.rows());
    const Eigen::MatrixXd filter = linalg::least_squares_filter(design);

    const SolveOutcome outcome = solve_stationary(design, filter, obs.as_vector(), taps + 1);
    switch (outcome.status) {
    case SolveStatus::Ok:
        return {outcome.values, outcome.iterations};
    case SolveStatus::Singular:
        throw SingularDesignError("no unique stationary point for active set " + active.to_string());
    case SolveStatus::Domain:
        throw DomainError("positive count with zero mean under active set " + active.to_string());
    case SolveStatus::NoConvergence:
        break;
    }
    throw NoConvergenceError("Newton iteration did not converge for active set " + active.to_string());
}

Eigen::MatrixXd lsse_filter_matrix(const ActiveSet& active, const TrainingSequence& seq)
{
    if (active.size() == 0) throw ArgumentError("active set must be non-empty");
    return linalg::least_squares_filter(restrict_columns(design_matrix(seq, active.num_taps()), active));
}

SubsetBank::SubsetBank(const TrainingSequence& seq, int num_taps)
    : seq_(seq), num_taps_(num_taps), design_(design_matrix(seq, num_taps))
{
    for (const ActiveSet& active : ActiveSet::enumerate(num_taps)) {
        Entry entry;
        entry.active = active;
        entry.columns = active.indices();
        entry.design = restrict_columns(design_, active);
        const Eigen::MatrixXd gram = entry.design.transpose() * entry.design;
        if (linalg::well_conditioned(gram)) entry.filter = gram.ldlt().solve(entry.design.transpose());
        entries_.push_back(std::move(entry));
    }
}

MlEstimator::MlEstimator(const TrainingSequence& seq, int num_taps) : bank_(seq, num_taps) {}

EstimateReport MlEstimator::estimate(const ObservationVector& obs) const
{
    check_observation_size(obs, bank_.num_observations());
    const Eigen::VectorXd r = obs.as_vector();
    const int params = bank_.num_taps() + 1;
    const auto& entries = bank_.entries();

    int iterations = 0;
    int evaluated = 0;
    int skipped = 0;

    const SolveOutcome first = solve_stationary(entries[0].design, entries[0].filter, r, params);
    ++evaluated;
    iterations += first.iterations;
    if (first.status == SolveStatus::Ok && (first.values.array() >= 0.0).all()) {
        const Eigen::VectorXd full = embed(entries[0], first.values, params);
        EstimateReport report = make_report(full, bank_.num_taps(), loglik_from_means(bank_.design() * full, r));
        report.solver_iterations = iterations;
        report.candidates_evaluated = evaluated;
        return report;
    }
    if (first.status != SolveStatus::Ok) ++skipped;

    std::optional<Eigen::VectorXd> best;
    double best_objective = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const SolveOutcome outcome = solve_stationary(entries[i].design, entries[i].filter, r, params);
        ++evaluated;
        iterations += outcome.iterations;
        if (outcome.status != SolveStatus::Ok) {
            ++skipped;
            continue;
        }
        if (!(outcome.values.array() >= 0.0).all()) continue;
        Eigen::VectorXd full = embed(entries[i], outcome.values, params);
        const double g = loglik_from_means(bank_.design() * full, r);
        if (!best || g > best_objective) {
            best = std::move(full);
            best_objective = g;
        }
    }
    if (!best) throw EstimationFailure("ML candidate set is empty");
    EstimateReport report = make_report(*best, bank_.num_taps(), best_objective);
    report.solver_iterations = iterations;
    report.candidates_evaluated = evaluated;
    report.subsets_skipped = skipped;
    return report;
}

LsseEstimator::LsseEstimator(const TrainingSequence& seq, int num_taps) : bank_(seq, num_taps) {}

Eigen::VectorXd LsseEstimator::unconstrained(const ObservationVector& obs) const
{
    check_observation_size(obs, bank_.num_observations());
    const auto& full = bank_.entries()[0];
    if (!full.filter) throw SingularDesignError("singular design matrix");
    return *full.filter * obs.as_vector();
}

EstimateReport LsseEstimator::estimate(const ObservationVector& obs) const
{
    check_observation_size(obs, bank_.num_observations());
    const Eigen::VectorXd r = obs.as_vector();
    const int params = bank_.num_taps() + 1;
    const auto& entries = bank_.entries();

    int evaluated = 0;
    int skipped = 0;
    if (entries[0].filter) {
        ++evaluated;
        const Eigen::VectorXd c = *entries[0].filter * r;
        if ((c.array() >= 0.0).all()) {
            EstimateReport report = make_report(c, bank_.num_taps(), (r - bank_.design() * c).squaredNorm());
            report.candidates_evaluated = evaluated;
            return report;
        }
    } else {
        ++skipped;
    }

    std::optional<Eigen::VectorXd> best;
    double best_objective = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const auto& entry = entries[i];
        if (!entry.filter) {
            ++skipped;
            continue;
        }
        ++evaluated;
        const Eigen::VectorXd c = *entry.filter * r;
        if (!(c.array() >= 0.0).all()) continue;
        const double objective = (r - entry.design * c).squaredNorm();
        if (!best || objective < best_objective) {
            best = embed(entry, c, params);
            best_objective = objective;
        }
    }
    if (!best) throw EstimationFailure("LSSE candidate set is empty");
    EstimateReport report = make_report(*best, bank_.num_taps(), best_objective);
    report.candidates_evaluated = evaluated;
    report.subsets_skipped = skipped;
    return report;
}

EstimateReport estimate_ml(const TrainingSequence& seq, const ObservationVector& obs)
{
    return MlEstimator(seq, infer_num_taps(seq, obs)).estimate(obs);
}

EstimateReport estimate_lsse(const TrainingSequence& seq, const ObservationVector& obs)
{
    return LsseEstimator(seq, infer_num_taps(seq, obs)).estimate(obs);
}

bool is_isi_free(const TrainingSequence& seq, int num_taps, int k0)
{
    if (num_taps < 1 || k0 < 1 || k0 > num_taps + 1) return false;
    for (int k = 1; k <= seq.length(); ++k) {
        const bool on = positive_mod(k - k0, num_taps + 1) == 0;
        if (seq.at(k) != (on ? 1 : 0)) return false;
    }
    return true;
}

EstimateReport estimate_isifree(const TrainingSequence& seq, const ObservationVector& obs, int k0)
{
    const int taps = infer_num_taps(seq, obs);
    if (!is_isi_free(seq, taps, k0))
        throw ArgumentError("training sequence is not ISI-free for L = " + std::to_string(taps) +
                            ", k0 = " + std::to_string(k0));
    check_observation_size(obs, seq.length() - taps + 1);

    // bucket L holds the noise-only samples
    std::vector<double> sums(static_cast<std::size_t>(taps + 1), 0.0);
    std::vector<int> sizes(static_cast<std::size_t>(taps + 1), 0);
    for (int k = taps; k <= seq.length(); ++k) {
        const auto bucket = static_cast<std::size_t>(positive_mod(k - k0, taps + 1));
        sums[bucket] += static_cast<double>(obs.counts[static_cast<std::size_t>(k - taps)]);
        ++sizes[bucket];
    }
    for (int b = 0; b <= taps; ++b)
        if (sizes[static_cast<std::size_t>(b)] == 0)
            throw InsufficientDataError(b == taps ? std::string("no noise-only samples")
                                                  : "no samples for tap " + std::to_string(b + 1));

    const auto noise = static_cast<std::size_t>(taps);
    Eigen::VectorXd c(taps + 1);
    c(taps) = sums[noise] / sizes[noise];
    for (int l = 0; l < taps; ++l) {
        const auto b = static_cast<std::size_t>(l);
        c(l) = std::max(0.0, (sums[b] - sizes[b] * c(taps)) / sizes[b]);
    }

    const Eigen::VectorXd r = obs.as_vector();
    EstimateReport report = make_report(c, taps, (r - design_matrix(seq, taps) * c).squaredNorm());
    report.candidates_evaluated = 1;
    return report;
}

}  // namespace molchan
