#include "molchan/cli.hpp"

#include <cstdio>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "molchan/bounds.hpp"
#include "molchan/channel.hpp"
#include "molchan/config.hpp"
#include "molchan/error.hpp"
#include "molchan/estimators.hpp"
#include "molchan/experiment.hpp"
#include "molchan/seq_design.hpp"

namespace molchan::cli {

namespace {

struct Options {
    std::optional<std::string> config;
    std::optional<std::string> seq;
    std::optional<int> length;
    std::optional<int> taps;
    std::optional<int> k0;
    std::optional<std::string> cir;
    std::optional<double> distance;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trial;
    std::optional<std::int64_t> trials;
    std::string estimator = "ml";
    std::string format = "csv";
    std::optional<std::string> out;
    double epsilon = kDesignEpsilon;
    double tap_threshold = 0.1;
    bool no_timing = false;
};

std::string fmt(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

PhysicalScenario load_scenario(const Options& opt)
{
    return opt.config ? load_scenario_config(*opt.config) : PhysicalScenario{};
}

Cir parse_cir(const std::string& text)
{
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ArgumentError("bad CIR entry '" + item + "'");
        values.push_back(v);
    }
    if (values.size() < 2) throw ArgumentError("--cir needs at least one tap and the noise mean");
    return Cir::from_vector(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

/// Explicit --cir, otherwise synthesized from the scenario.
Cir resolve_cir(const Options& opt)
{
    if (opt.cir) {
        Cir cir = parse_cir(*opt.cir);
        if (opt.taps && *opt.taps != cir.num_taps()) throw ArgumentError("--L disagrees with the length of --cir");
        return cir;
    }
    const PhysicalScenario scenario = scenario_for_taps(load_scenario(opt), opt.taps.value_or(1), opt.tap_threshold);
    return opt.distance ? synthesize_cir(scenario, *opt.distance) : synthesize_cir(scenario);
}

TrainingSequence resolve_sequence(const Options& opt, int taps)
{
    if (opt.k0) {
        if (!opt.length) throw ArgumentError("--k0 needs --K");
        return isi_free_sequence(*opt.length, taps, *opt.k0);
    }
    const std::string text = opt.seq.value_or("fig1-base");
    const TrainingSequence base = text == "fig1-base" ? fig1_base() : TrainingSequence::parse(text);
    return opt.length ? TrainingSequence::repeated(base, *opt.length) : base;
}

ObservationVector read_counts(std::istream& in)
{
    ObservationVector obs;
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        long long v = -1;
        try {
            v = std::stoll(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || v < 0) throw ArgumentError("bad count '" + token + "' on stdin");
        obs.counts.push_back(v);
    }
    if (obs.counts.empty()) throw ArgumentError("no counts on stdin");
    return obs;
}

int cmd_simulate(const Options& opt, std::ostream& out)
{
    const Cir cir = resolve_cir(opt);
    const TrainingSequence seq = resolve_sequence(opt, cir.num_taps());
    const ObservationVector obs = simulate_observations(cir, seq, opt.seed.value_or(1), opt.trial.value_or(0));
    for (int k = 0; k < obs.size(); ++k) out << (k ? " " : "") << obs.counts[static_cast<std::size_t>(k)];
    out << "\n";
    return 0;
}

int cmd_estimate(const Options& opt, std::istream& in, std::ostream& out)
{
    const ObservationVector obs = read_counts(in);
    TrainingSequence seq = resolve_sequence(opt, opt.taps.value_or(1));
    const int taps = opt.taps.value_or(infer_num_taps(seq, obs));
    if (opt.k0 && !opt.taps) throw ArgumentError("--k0 needs --L");
    const EstimatorKind kind = parse_estimator(opt.estimator);
    EstimateReport report;
    switch (kind) {
    case EstimatorKind::Ml:
        report = MlEstimator(seq, taps).estimate(obs);
        break;
    case EstimatorKind::Lsse:
        report = LsseEstimator(seq, taps).estimate(obs);
        break;
    case EstimatorKind::IsiFree:
        report = estimate_isifree(seq, obs, opt.k0.value_or(1));
        break;
    }
    out << to_record(report, to_string(kind)) << "\n";
    return 0;
}

int cmd_crbound(const Options& opt, std::ostream& out)
{
    const Cir cir = resolve_cir(opt);
    const TrainingSequence seq = resolve_sequence(opt, cir.num_taps());
    out << fmt(cr_bound(cir, seq)) << "\n";
    return 0;
}

int cmd_design(const Options& opt, std::ostream& out)
{
    if (!opt.taps || (!opt.length && !opt.seq)) throw ArgumentError("design-seq needs --L and --K or --seq");
    Cir prior;
    if (opt.cir) {
        prior = resolve_cir(opt);
    } else {
        const PhysicalScenario scenario = scenario_for_taps(load_scenario(opt), *opt.taps, opt.tap_threshold);
        prior = mean_cir(scenario, opt.seed.value_or(1));
    }
    TrainingSequence seq;
    double objective = 0.0;
    if (opt.seq) {
        seq = resolve_sequence(opt, *opt.taps);
        objective = design_objective(seq, prior, opt.epsilon).objective;
    } else if (opt.k0) {
        seq = isi_free_sequence(*opt.length, *opt.taps, *opt.k0);
        objective = design_objective(seq, prior, opt.epsilon).objective;
    } else {
        const SearchResult result = search_optimal_sequence(*opt.length, *opt.taps, prior, opt.epsilon);
        seq = result.sequence;
        objective = result.value.objective;
    }
    out << seq.to_string() << " " << fmt(objective) << "\n";
    return 0;
}

int cmd_synth(const Options& opt, std::ostream& out)
{
    const PhysicalScenario scenario = scenario_for_taps(load_scenario(opt), opt.taps.value_or(1), opt.tap_threshold);
    const Cir cir = opt.distance ? synthesize_cir(scenario, *opt.distance) : synthesize_cir(scenario);
    const Eigen::VectorXd v = cir.as_vector();
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? "," : "") << fmt(v[i]);
    out << "\n";
    return 0;
}

int cmd_experiment(const Options& opt, std::ostream& out, std::ostream& err)
{
    ExperimentSpec spec = opt.config ? load_experiment_config(*opt.config) : ExperimentSpec{};
    if (opt.seed) spec.master_seed = *opt.seed;
    if (opt.trials) spec.num_trials = *opt.trials;
    if (opt.no_timing) spec.record_timing = false;
    const OutputFormat format = parse_format(opt.format);
    if (spec.scenario.distance_halfwidth > 0.0)
        err << "note: distance redrawn per trial; CR bound evaluated at the mean-distance CIR\n";

    const std::vector<ResultRow> rows = run_experiment(spec);
    for (const ResultRow& row : rows)
        if (!row.skip_reason.empty())
            err << "skipped " << row.estimator << " K=" << row.K << " L=" << row.L << ": " << row.skip_reason << "\n";
    if (opt.out) {
        emit_results(rows, format, *opt.out);
    } else {
        out << format_results(rows, format);
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Poisson channel estimation for diffusion-based molecular communication", "molchan"};
    app.require_subcommand(1);
    Options opt;

    auto add_sequence = [&](CLI::App* sub) {
        sub->add_option("--seq", opt.seq, "Training bits or fig1-base");
        sub->add_option("--K", opt.length, "Sequence length (repeats --seq)");
        sub->add_option("--k0", opt.k0, "Use the ISI-free sequence with this offset");
    };
    auto add_channel = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "INI file with a [scenario] section");
        sub->add_option("--L", opt.taps, "Number of taps");
        sub->add_option("--cir", opt.cir, "Explicit CIR: c1,...,cL,cn");
        sub->add_option("--distance", opt.distance, "Transmitter-receiver distance in metres");
        sub->add_option("--tap-threshold", opt.tap_threshold, "Relative last-tap threshold for T_sym");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Draw one observation vector");
    add_channel(simulate);
    add_sequence(simulate);
    simulate->add_option("--seed", opt.seed, "RNG seed");
    simulate->add_option("--trial", opt.trial, "Trial index");

    CLI::App* estimate = app.add_subcommand("estimate", "Estimate the CIR from counts on stdin");
    add_sequence(estimate);
    estimate->add_option("--L", opt.taps, "Number of taps (default: inferred)");
    estimate->add_option("--estimator", opt.estimator, "ml | lsse | isi-free");

    CLI::App* crbound = app.add_subcommand("crbound", "Print the CR lower bound");
    add_channel(crbound);
    add_sequence(crbound);

    CLI::App* design = app.add_subcommand("design-seq", "Optimal or ISI-free training sequence");
    add_channel(design);
    design->add_option("--K", opt.length, "Sequence length");
    design->add_option("--k0", opt.k0, "Return the ISI-free sequence with this offset");
    design->add_option("--seq", opt.seq, "Score this sequence instead of searching");
    design->add_option("--epsilon", opt.epsilon, "Eigenvalue admissibility threshold");
    design->add_option("--seed", opt.seed, "Seed for the prior mean");

    CLI::App* synth = app.add_subcommand("synth-cir", "Print the synthesized CIR");
    synth->add_option("--config", opt.config, "INI file with a [scenario] section");
    synth->add_option("--L", opt.taps, "Number of taps");
    synth->add_option("--distance", opt.distance, "Transmitter-receiver distance in metres");
    synth->add_option("--tap-threshold", opt.tap_threshold, "Relative last-tap threshold for T_sym");

    CLI::App* experiment = app.add_subcommand("experiment", "Run a Monte Carlo sweep");
    experiment->add_option("--config", opt.config, "INI experiment configuration");
    experiment->add_option("--seed", opt.seed, "Master seed");
    experiment->add_option("--trials", opt.trials, "Trials per cell");
    experiment->add_option("--format", opt.format, "csv | json");
    experiment->add_option("--out", opt.out, "Output file (default stdout)");
    experiment->add_flag("--no-timing", opt.no_timing, "Leave the seconds column empty");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "molchan: " << e.what() << "\n" << "run 'molchan --help' for usage\n";
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opt, out);
        if (estimate->parsed()) return cmd_estimate(opt, in, out);
        if (crbound->parsed()) return cmd_crbound(opt, out);
        if (design->parsed()) return cmd_design(opt, out);
        if (synth->parsed()) return cmd_synth(opt, out);
        if (experiment->parsed()) return cmd_experiment(opt, out, err);
    } catch (const Error& e) {
        err << "molchan: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace molchan::cli
