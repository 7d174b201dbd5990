#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molchan/types.hpp"

namespace molchan {

enum class SequenceSource { RepeatedBase, IsiFree, OptimalSearch, Explicit };
enum class EstimatorKind { Ml, Lsse, IsiFree };
enum class OutputFormat { Csv, Json };

std::string_view to_string(SequenceSource source);
std::string_view to_string(EstimatorKind kind);
SequenceSource parse_sequence_source(std::string_view text);
EstimatorKind parse_estimator(std::string_view text);
OutputFormat parse_format(std::string_view text);

/// Sequence for one (K, L) cell. Explicit sources ignore K.
struct SequenceSpec {
    SequenceSource source = SequenceSource::RepeatedBase;
    TrainingSequence base = fig1_base();  // RepeatedBase
    int k0 = 1;                           // IsiFree
    TrainingSequence bits;                // Explicit
    double epsilon = 1e-9;                // OptimalSearch
};

struct ExperimentSpec {
    /// symbol_duration = 0 picks it per L with the tap threshold below.
    PhysicalScenario scenario;
    SequenceSpec sequence;
    std::vector<EstimatorKind> estimators{EstimatorKind::Ml, EstimatorKind::Lsse};
    std::vector<int> taps_list{1};
    std::vector<int> lengths_list{10};
    std::int64_t num_trials = 100000;
    std::uint64_t master_seed = 1;
    /// Attach the analytical unconstrained-LSSE error bound to each row.
    bool lsse_bound = false;
    double tap_threshold = 0.1;
    /// Distance draws used to estimate the prior mean CIR.
    int prior_draws = 10000;
    /// 0 = MOLCHAN_THREADS / hardware concurrency.
    unsigned workers = 0;
    /// Fill the seconds column; disable for byte-reproducible output.
    bool record_timing = true;

    void validate() const;
};

struct ResultRow {
    std::string estimator;
    int K = 0;
    int L = 0;
    std::optional<double> mean_db;
    std::optional<double> var_db;
    std::optional<double> cr_db;
    std::optional<double> bound_db;
    std::int64_t trials = 0;
    std::optional<double> seconds;
    /// Non-empty for skipped cells.
    std::string skip_reason;
};

/// Builds the training sequence of one cell.
TrainingSequence build_sequence(const SequenceSpec& spec, int length, int num_taps, const Cir& prior_mean,
                                unsigned workers = 0);

/// Monte Carlo sweep over taps_list x lengths_list x estimators. Rows come out
/// in that nesting order, one per cell, infeasible cells as skipped rows.
/// Deterministic given master_seed regardless of worker count.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Fixed CSV header.
inline constexpr std::string_view kCsvHeader = "estimator,K,L,mean_db,var_db,cr_db,bound_db,trials,seconds";

std::string format_results(std::span<const ResultRow> rows, OutputFormat format);

/// Writes format_results to `path`. Throws ArgumentError for empty rows and
/// IoError when the file cannot be written.
void emit_results(std::span<const ResultRow> rows, OutputFormat format, const std::filesystem::path& path);

}  // namespace molchan
