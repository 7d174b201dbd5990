#include "molchan/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "molchan/bounds.hpp"
#include "molchan/channel.hpp"
#include "molchan/error.hpp"
#include "molchan/estimators.hpp"
#include "molchan/parallel.hpp"
#include "molchan/seq_design.hpp"

namespace molchan {

namespace {

constexpr std::int64_t kTrialsPerChunk = 1024;

std::string format_number(double value, const char* pattern)
{
    if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
    if (std::isnan(value)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, value);
    return buf;
}

std::string format_optional(const std::optional<double>& value, const char* pattern)
{
    return value ? format_number(*value, pattern) : std::string();
}

nlohmann::ordered_json json_number(const std::optional<double>& value)
{
    if (!value) return nullptr;
    if (!std::isfinite(*value)) return format_number(*value, "%g");
    return *value;
}

// One estimator bound to the cell's training sequence.
class CellEstimator {
public:
    CellEstimator(EstimatorKind kind, const TrainingSequence& seq, int taps, int k0) : kind_(kind), seq_(seq), k0_(k0)
    {
        if (kind == EstimatorKind::Ml) ml_.emplace(seq, taps);
        if (kind == EstimatorKind::Lsse) lsse_.emplace(seq, taps);
    }

    EstimateReport estimate(const ObservationVector& obs) const
    {
        switch (kind_) {
        case EstimatorKind::Ml:
            return ml_->estimate(obs);
        case EstimatorKind::Lsse:
            return lsse_->estimate(obs);
        case EstimatorKind::IsiFree:
            break;
        }
        return estimate_isifree(seq_, obs, k0_);
    }

private:
    EstimatorKind kind_;
    const TrainingSequence& seq_;
    int k0_;
    std::optional<MlEstimator> ml_;
    std::optional<LsseEstimator> lsse_;
};

std::optional<int> isi_free_offset(const SequenceSpec& spec, const TrainingSequence& seq, int taps)
{
    if (spec.source == SequenceSource::IsiFree) return is_isi_free(seq, taps, spec.k0) ? std::optional(spec.k0) : std::nullopt;
    for (int k0 = 1; k0 <= taps + 1; ++k0)
        if (is_isi_free(seq, taps, k0)) return k0;
    return std::nullopt;
}

ResultRow skipped_row(EstimatorKind kind, int length, int taps, std::string reason)
{
    ResultRow row;
    row.estimator = std::string(to_string(kind));
    row.K = length;
    row.L = taps;
    row.skip_reason = std::move(reason);
    return row;
}

struct ChunkResult {
    std::vector<ErrorAccumulator> accumulators;
    std::vector<std::string> failures;
};

void run_cell(const ExperimentSpec& spec, const PhysicalScenario& scenario, const Cir& prior, int length,
              std::vector<ResultRow>& rows)
{
    const int taps = scenario.num_taps;
    const auto started = std::chrono::steady_clock::now();

    auto skip_all = [&](const std::string& reason) {
        for (EstimatorKind kind : spec.estimators) rows.push_back(skipped_row(kind, length, taps, reason));
    };
    if (length < 2 * taps) {
        skip_all("K < 2L");
        return;
    }

    TrainingSequence seq;
    try {
        seq = build_sequence(spec.sequence, length, taps, prior, spec.workers);
    } catch (const Error& e) {
        skip_all(e.what());
        return;
    }

    std::vector<EstimatorKind> active;
    std::vector<std::optional<CellEstimator>> estimators;
    std::vector<std::string> reasons(spec.estimators.size());
    const std::optional<int> k0 = isi_free_offset(spec.sequence, seq, taps);
    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
        const EstimatorKind kind = spec.estimators[e];
        if (kind == EstimatorKind::IsiFree && !k0) {
            reasons[e] = "training sequence is not ISI-free";
            estimators.emplace_back();
            continue;
        }
        estimators.emplace_back(std::in_place, kind, seq, taps, k0.value_or(1));
    }

    std::optional<double> cr;
    try {
        cr = cr_bound(synthesize_cir(scenario), seq);
    } catch (const Error&) {
    }
    std::optional<double> bound_db;
    if (spec.lsse_bound) {
        try {
            bound_db = to_db(lsse_error_upper_bound(seq, prior) / prior.as_vector().squaredNorm());
        } catch (const Error&) {
        }
    }

    const bool random_distance = scenario.distance_halfwidth > 0.0;
    const Cir fixed_truth = synthesize_cir(scenario);
    const Eigen::MatrixXd design = design_matrix(seq, taps);
    const std::int64_t chunks = (spec.num_trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<ChunkResult> results(static_cast<std::size_t>(chunks));

    parallel_for(static_cast<std::size_t>(chunks), resolve_workers(spec.workers), [&](std::size_t c) {
        ChunkResult& result = results[c];
        result.accumulators.assign(estimators.size(), ErrorAccumulator(taps + 1));
        result.failures.assign(estimators.size(), {});
        const std::int64_t begin = static_cast<std::int64_t>(c) * kTrialsPerChunk;
        const std::int64_t end = std::min(spec.num_trials, begin + kTrialsPerChunk);
        for (std::int64_t t = begin; t < end; ++t) {
            const auto trial = static_cast<std::uint64_t>(t);
            const Cir truth =
                random_distance ? synthesize_cir(scenario, draw_distance(scenario, spec.master_seed, trial)) : fixed_truth;
            const ObservationVector obs = simulate_observations(truth, seq, spec.master_seed, trial);
            const Eigen::VectorXd truth_vec = truth.as_vector();
            for (std::size_t e = 0; e < estimators.size(); ++e) {
                if (!estimators[e] || !result.failures[e].empty()) continue;
                try {
                    result.accumulators[e].add(estimators[e]->estimate(obs).cir_hat.as_vector(), truth_vec);
                } catch (const Error& ex) {
                    result.failures[e] = "trial " + std::to_string(t) + ": " + ex.what();
                }
            }
        }
    });

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    for (std::size_t e = 0; e < spec.estimators.size(); ++e) {
        const EstimatorKind kind = spec.estimators[e];
        if (!estimators[e]) {
            rows.push_back(skipped_row(kind, length, taps, reasons[e]));
            continue;
        }
        ErrorAccumulator total(taps + 1);
        std::string failure;
        for (const ChunkResult& r : results) {
            if (failure.empty() && !r.failures[e].empty()) failure = r.failures[e];
            total.merge(r.accumulators[e]);
        }
        if (!failure.empty()) {
            rows.push_back(skipped_row(kind, length, taps, failure));
            continue;
        }
        ResultRow row;
        row.estimator = std::string(to_string(kind));
        row.K = length;
        row.L = taps;
        try {
            const ErrorStats stats = total.finish();
            row.mean_db = to_db(stats.normalized_mean);
            row.var_db = to_db(stats.normalized_var);
            if (cr) row.cr_db = to_db(*cr / total.mean_truth().squaredNorm());
        } catch (const Error& ex) {
            rows.push_back(skipped_row(kind, length, taps, ex.what()));
            continue;
        }
        row.bound_db = bound_db;
        row.trials = total.count();
        if (spec.record_timing) row.seconds = seconds;
        rows.push_back(std::move(row));
    }
}

}  // namespace

std::string_view to_string(SequenceSource source)
{
    switch (source) {
    case SequenceSource::RepeatedBase:
        return "repeated-base";
    case SequenceSource::IsiFree:
        return "isi-free";
    case SequenceSource::OptimalSearch:
        return "optimal-search";
    case SequenceSource::Explicit:
        return "explicit";
    }
    return "?";
}

std::string_view to_string(EstimatorKind kind)
{
    switch (kind) {
    case EstimatorKind::Ml:
        return "ml";
    case EstimatorKind::Lsse:
        return "lsse";
    case EstimatorKind::IsiFree:
        return "isi-free";
    }
    return "?";
}

SequenceSource parse_sequence_source(std::string_view text)
{
    for (auto s : {SequenceSource::RepeatedBase, SequenceSource::IsiFree, SequenceSource::OptimalSearch,
                   SequenceSource::Explicit})
        if (text == to_string(s)) return s;
    throw ConfigError("unknown sequence source '" + std::string(text) + "'");
}

EstimatorKind parse_estimator(std::string_view text)
{
    for (auto k : {EstimatorKind::Ml, EstimatorKind::Lsse, EstimatorKind::IsiFree})
        if (text == to_string(k)) return k;
    throw ConfigError("unknown estimator '" + std::string(text) + "'");
}

OutputFormat parse_format(std::string_view text)
{
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw ConfigError("unknown output format '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const
{
    scenario.validate();
    if (num_trials < 1) throw ConfigError("num_trials must be at least 1");
    if (estimators.empty()) throw ConfigError("no estimators requested");
    if (taps_list.empty()) throw ConfigError("taps_list is empty");
    for (int l : taps_list)
        if (l < 1) throw ConfigError("taps_list entries must be at least 1");
    if (sequence.source != SequenceSource::Explicit) {
        if (lengths_list.empty()) throw ConfigError("lengths_list is empty");
        for (int k : lengths_list)
            if (k < 1) throw ConfigError("lengths_list entries must be positive");
    } else if (sequence.bits.length() == 0) {
        throw ConfigError("explicit sequence source needs bits");
    }
    if (!(tap_threshold > 0.0)) throw ConfigError("tap_threshold must be positive");
    if (prior_draws < 1) throw ConfigError("prior_draws must be at least 1");
}

TrainingSequence build_sequence(const SequenceSpec& spec, int length, int num_taps, const Cir& prior_mean,
                                unsigned workers)
{
    switch (spec.source) {
    case SequenceSource::RepeatedBase:
        return TrainingSequence::repeated(spec.base, length);
    case SequenceSource::IsiFree:
        return isi_free_sequence(length, num_taps, spec.k0);
    case SequenceSource::OptimalSearch:
        return search_optimal_sequence(length, num_taps, prior_mean, spec.epsilon, workers).sequence;
    case SequenceSource::Explicit:
        break;
    }
    if (spec.bits.length() == 0) throw ArgumentError("explicit sequence is empty");
    return spec.bits;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    std::vector<ResultRow> rows;
    for (int taps : spec.taps_list) {
        PhysicalScenario scenario;
        Cir prior;
        try {
            scenario = scenario_for_taps(spec.scenario, taps, spec.tap_threshold);
            prior = mean_cir(scenario, spec.master_seed, spec.prior_draws);
        } catch (const Error& e) {
            const std::vector<int> lengths =
                spec.sequence.source == SequenceSource::Explicit ? std::vector<int>{spec.sequence.bits.length()} : spec.lengths_list;
            for (int length : lengths)
                for (EstimatorKind kind : spec.estimators) rows.push_back(skipped_row(kind, length, taps, e.what()));
            continue;
        }
        if (spec.sequence.source == SequenceSource::Explicit) {
            run_cell(spec, scenario, prior, spec.sequence.bits.length(), rows);
            continue;
        }
        for (int length : spec.lengths_list) run_cell(spec, scenario, prior, length, rows);
    }
    return rows;
}

std::string format_results(std::span<const ResultRow> rows, OutputFormat format)
{
    if (format == OutputFormat::Json) {
        auto array = nlohmann::ordered_json::array();
        for (const ResultRow& row : rows) {
            nlohmann::ordered_json obj;
            obj["estimator"] = row.estimator;
            obj["K"] = row.K;
            obj["L"] = row.L;
            obj["mean_db"] = json_number(row.mean_db);
            obj["var_db"] = json_number(row.var_db);
            obj["cr_db"] = json_number(row.cr_db);
            obj["bound_db"] = json_number(row.bound_db);
            obj["trials"] = row.trials;
            obj["seconds"] = json_number(row.seconds);
            array.push_back(std::move(obj));
        }
        return array.dump(2) + "\n";
    }

    std::string out(kCsvHeader);
    out += "\n";
    for (const ResultRow& row : rows) {
        out += row.estimator + "," + std::to_string(row.K) + "," + std::to_string(row.L) + ",";
        out += format_optional(row.mean_db, "%.10g") + ",";
        out += format_optional(row.var_db, "%.10g") + ",";
        out += format_optional(row.cr_db, "%.10g") + ",";
        out += format_optional(row.bound_db, "%.10g") + ",";
        out += std::to_string(row.trials) + ",";
        out += format_optional(row.seconds, "%.3f") + "\n";
    }
    return out;
}

void emit_results(std::span<const ResultRow> rows, OutputFormat format, const std::filesystem::path& path)
{
    if (rows.empty()) throw ArgumentError("no result rows to write");
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
    const std::string text = format_results(rows, format);
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!file) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace molchan
