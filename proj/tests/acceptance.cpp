// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "molchan/bounds.hpp"
#include "molchan/channel.hpp"
#include "molchan/cli.hpp"
#include "molchan/config.hpp"
#include "molchan/error.hpp"
#include "molchan/estimators.hpp"
#include "molchan/experiment.hpp"
#include "molchan/seq_design.hpp"
#include "oracles.hpp"

using namespace molchan;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TrainingSequence from_ints(const std::vector<int>& s) { return TrainingSequence({s.begin(), s.end()}); }

oracle::Vec to_doubles(const Cir& cir)
{
    oracle::Vec v(cir.taps.begin(), cir.taps.end());
    v.push_back(cir.noise_mean);
    return v;
}

double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }

// 1
Outcome grouped_ml()
{
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<int> half(2, 30);
    std::uniform_real_distribution<double> tap(0.0, 30.0), noise(0.2, 15.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const int K = 2 * half(gen);
        const double c1 = tap(gen), cn = noise(gen);
        const TrainingSequence seq = isi_free_sequence(K, 1, 1 + i % 2);
        ObservationVector obs;
        double on = 0, off = 0;
        for (int k = 1; k <= K; ++k) {
            const bool is_on = seq.at(k) == 1;
            obs.counts.push_back(std::poisson_distribution<std::int64_t>(cn + (is_on ? c1 : 0.0))(gen));
            (is_on ? on : off) += static_cast<double>(obs.counts.back());
        }
        on /= K / 2;
        off /= K / 2;
        const Cir want = on >= off ? Cir{{on - off}, off} : Cir{{0.0}, (on + off) / 2};
        const Cir got = estimate_ml(seq, obs).cir_hat;
        worst = std::max({worst, std::abs(got.taps[0] - want.taps[0]), std::abs(got.noise_mean - want.noise_mean)});
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-8 && elapsed < 10, format("max deviation %.3g over 1000 instances, %.2f s", worst, elapsed)};
}

struct Instance {
    std::vector<int> s;
    int L;
    oracle::Vec r;
};

std::vector<Instance> small_instances()
{
    std::mt19937_64 gen(202);
    std::bernoulli_distribution bit(0.5), sparse(0.25);
    std::uniform_real_distribution<double> level(0.0, 12.0);
    std::vector<Instance> out;
    while (out.size() < 1000) {
        Instance inst;
        inst.L = 1 + static_cast<int>(out.size() % 2);
        const int K = std::uniform_int_distribution<int>(2 * inst.L, 8)(gen);
        for (int k = 0; k < K; ++k) inst.s.push_back(bit(gen));
        oracle::Vec c;
        for (int i = 0; i <= inst.L; ++i) c.push_back(sparse(gen) ? 0.0 : level(gen));
        for (double m : oracle::means(oracle::design(inst.s, inst.L), c))
            inst.r.push_back(m > 0 ? static_cast<double>(std::poisson_distribution<int>(m)(gen)) : 0.0);
        out.push_back(inst);
    }
    return out;
}

// 2
Outcome lsse_grid(const std::vector<Instance>& instances)
{
    const auto start = std::chrono::steady_clock::now();
    double worst = 0;
    int failures = 0;
    for (const Instance& inst : instances) {
        const oracle::Mat S = oracle::design(inst.s, inst.L);
        const double upper = 2 * *std::max_element(inst.r.begin(), inst.r.end()) + 2;
        const oracle::GridResult grid = oracle::grid_optimize(
            [&](const oracle::Vec& c) { return oracle::sse(S, inst.r, c); }, inst.L + 1, upper, false);
        try {
            const EstimateReport rep = estimate_lsse(from_ints(inst.s), ObservationVector{{inst.r.begin(), inst.r.end()}});
            worst = std::max(worst, std::abs(rep.objective - grid.value));
            worst = std::max(worst, std::abs(oracle::sse(S, inst.r, to_doubles(rep.cir_hat)) - grid.value));
        } catch (const Error&) {
            ++failures;
        }
    }
    const double elapsed = seconds_since(start);
    return {failures == 0 && worst <= 1e-4 && elapsed < 120,
            format("max |objective - grid minimum| %.3g, %d estimator errors, %.1f s", worst, failures, elapsed)};
}

// 3
Outcome ml_grid(const std::vector<Instance>& instances)
{
    const auto start = std::chrono::steady_clock::now();
    double worst = -INFINITY;
    int failures = 0;
    for (const Instance& inst : instances) {
        const oracle::Mat S = oracle::design(inst.s, inst.L);
        const double upper = 2 * *std::max_element(inst.r.begin(), inst.r.end()) + 2;
        const oracle::GridResult grid = oracle::grid_optimize(
            [&](const oracle::Vec& c) { return oracle::loglik(S, inst.r, c); }, inst.L + 1, upper, true);
        try {
            const EstimateReport rep = estimate_ml(from_ints(inst.s), ObservationVector{{inst.r.begin(), inst.r.end()}});
            worst = std::max(worst, grid.value - oracle::loglik(S, inst.r, to_doubles(rep.cir_hat)));
        } catch (const Error&) {
            ++failures;
        }
    }
    const double elapsed = seconds_since(start);
    return {failures == 0 && worst <= 1e-6 && elapsed < 120,
            format("max grid excess over g(estimate) %.3g, %d estimator errors, %.1f s", worst, failures, elapsed)};
}

// 4
Outcome cr_closed_form()
{
    const TrainingSequence seq = isi_free_sequence(100, 1, 1);
    const double cr = cr_bound(Cir{{9.0}, 2.0}, seq);
    const double twice = cr_bound(Cir{{9.0}, 2.0}, TrainingSequence::repeated(seq, 200));
    const double err = std::abs(cr - 0.30), half_err = std::abs(twice - cr / 2);
    return {err <= 1e-12 && half_err <= 1e-12,
            format("bound %.17g (|err| %.2g), repeated twice %.17g (|err vs half| %.2g)", cr, err, twice, half_err)};
}

// 5
Outcome cr_tightness()
{
    const auto start = std::chrono::steady_clock::now();
    ExperimentSpec spec;
    spec.taps_list = {1};
    spec.lengths_list = {100};
    spec.num_trials = 100000;
    spec.record_timing = false;
    const std::vector<ResultRow> rows = run_experiment(spec);
    double ml = NAN, ls = NAN;
    for (const ResultRow& r : rows) {
        if (!r.mean_db || !r.var_db || !r.cr_db) continue;
        const double ratio = (db_to_ratio(*r.var_db) + db_to_ratio(*r.mean_db)) / db_to_ratio(*r.cr_db);
        (r.estimator == "ml" ? ml : ls) = ratio;
    }
    const double elapsed = seconds_since(start);
    const bool pass = std::abs(ml - 1) <= 0.05 && std::abs(ls - 1) <= 0.07 && elapsed < 300;
    return {pass, format("E||e||^2 / CR: ml %.4f, lsse %.4f, %.1f s", ml, ls, elapsed)};
}

// 6
Outcome mean_decreasing(const std::filesystem::path& config)
{
    const auto start = std::chrono::steady_clock::now();
    ExperimentSpec spec = load_experiment_config(config);
    spec.record_timing = false;
    const std::vector<ResultRow> rows = run_experiment(spec);
    bool pass = true;
    std::string detail;
    for (int L : spec.taps_list) {
        for (const char* est : {"ml", "lsse"}) {
            std::vector<double> means;
            for (const ResultRow& r : rows)
                if (r.L == L && r.estimator == est && r.mean_db) means.push_back(*r.mean_db);
            bool ok = means.size() == spec.lengths_list.size();
            for (std::size_t i = 1; ok && i < means.size(); ++i) ok = means[i] < means[i - 1];
            pass = pass && ok;
            detail += format("%s L=%d [", est, L);
            for (std::size_t i = 0; i < means.size(); ++i) detail += format(i ? ", %.2f" : "%.2f", means[i]);
            detail += ok ? "] " : "] not decreasing; ";
        }
    }
    const double elapsed = seconds_since(start);
    return {pass && elapsed < 600, detail + format("(dB, K = 20/40/80, %.1f s)", elapsed)};
}

// 7
Outcome bound_tightness()
{
    const auto start = std::chrono::steady_clock::now();
    PhysicalScenario base;
    base.distance_halfwidth = 100e-9;
    const PhysicalScenario sc = scenario_for_taps(base, 2);
    const std::uint64_t seed = 1;
    const Cir prior = mean_cir(sc, seed);
    const TrainingSequence seq = search_optimal_sequence(16, 2, prior).sequence;
    const double bound = lsse_error_upper_bound(seq, prior);
    const LsseEstimator lsse(seq, 2);
    CompensatedSum total;
    const int n = 100000;
    for (int t = 0; t < n; ++t) {
        const auto trial = static_cast<std::uint64_t>(t);
        const Cir truth = synthesize_cir(sc, draw_distance(sc, seed, trial));
        total.add((lsse.unconstrained(simulate_observations(truth, seq, seed, trial)) - truth.as_vector()).squaredNorm());
    }
    const double empirical = total.value() / n;
    const double rel = std::abs(bound - empirical) / empirical;
    return {rel <= 0.03, format("sequence %s: bound %.5g, empirical %.5g, relative gap %.4f, %.1f s",
                                seq.to_string().c_str(), bound, empirical, rel, seconds_since(start))};
}

// 8
Outcome table_search()
{
    const auto start = std::chrono::steady_clock::now();
    PhysicalScenario base;
    base.distance_halfwidth = 100e-9;
    bool pass = true;
    std::string detail;
    for (auto [K, k0] : {std::pair{10, 1}, std::pair{16, 2}}) {
        const Cir prior = mean_cir(scenario_for_taps(base, 1), 1);
        const SearchResult best = search_optimal_sequence(K, 1, prior);
        const TrainingSequence alt = isi_free_sequence(K, 1, k0);
        const double alt_value = design_objective(alt, prior).objective;
        const bool ok = std::abs(best.value.objective - alt_value) <= 1e-12;
        pass = pass && ok;
        detail += format("L=1 K=%d: search %s %.12g vs alternating %s %.12g%s; ", K, best.sequence.to_string().c_str(),
                         best.value.objective, alt.to_string().c_str(), alt_value, ok ? "" : " MISMATCH");
    }
    const Cir prior2 = mean_cir(scenario_for_taps(base, 2), 1);
    const SearchResult best2 = search_optimal_sequence(10, 2, prior2);
    double best_isi = INFINITY;
    for (int k0 = 1; k0 <= 3; ++k0) best_isi = std::min(best_isi, design_objective(isi_free_sequence(10, 2, k0), prior2).objective);
    const bool ok2 = best2.value.objective < best_isi;
    pass = pass && ok2;
    detail += format("L=2 K=10: search %s %.12g vs best ISI-free %.12g%s", best2.sequence.to_string().c_str(),
                     best2.value.objective, best_isi, ok2 ? "" : " NOT SMALLER");
    const double elapsed = seconds_since(start);
    return {pass && elapsed < 600, detail + format(", %.2f s", elapsed)};
}

// 9
Outcome singular_cli()
{
    const char* argv[] = {"molchan", "crbound", "--seq", "fig1-base", "--K", "10", "--L", "5"};
    std::istringstream in;
    std::ostringstream out, err;
    const int code = cli::run(8, argv, in, out, err);
    const bool pass = code == 1 && out.str().empty() && err.str().find("singular Fisher matrix") != std::string::npos;
    std::string msg = err.str();
    if (!msg.empty() && msg.back() == '\n') msg.pop_back();
    return {pass, format("exit %d, stderr \"%s\"", code, msg.c_str())};
}

// 10
Outcome channel_statistics()
{
    const Cir cir{{9.0}, 2.0};
    const TrainingSequence seq = TrainingSequence::parse("10");
    const int n = 1000000;
    CompensatedSum sum[2], sq[2];
    for (int t = 0; t < n; ++t) {
        const ObservationVector obs = simulate_observations(cir, seq, 10, static_cast<std::uint64_t>(t));
        for (int i = 0; i < 2; ++i) {
            const auto x = static_cast<double>(obs.counts[static_cast<std::size_t>(i)]);
            sum[i].add(x);
            sq[i].add(x * x);
        }
    }
    bool pass = true;
    std::string detail;
    const double target[2] = {11.0, 2.0};
    for (int i = 0; i < 2; ++i) {
        const double mean = sum[i].value() / n;
        const double var = (sq[i].value() - n * mean * mean) / (n - 1);
        const bool ok = std::abs(mean - target[i]) <= 0.01 * target[i] && std::abs(var - target[i]) <= 0.03 * target[i];
        pass = pass && ok;
        detail += format("mean %.4g: sample mean %.5g, variance %.5g; ", target[i], mean, var);
    }
    return {pass, detail + "1e6 samples each"};
}

// 11
Outcome isi_free_fixture()
{
    const EstimateReport r = estimate_isifree(TrainingSequence::parse("100100"), ObservationVector{{7, 2, 12, 6, 3}}, 1);
    const bool pass = r.cir_hat.taps.size() == 2 && r.cir_hat.taps[0] == 9.5 && r.cir_hat.taps[1] == 4.0 &&
                      r.cir_hat.noise_mean == 2.5;
    return {pass, format("c_1 = %.17g, c_2 = %.17g, c_n = %.17g", r.cir_hat.taps[0], r.cir_hat.taps[1], r.cir_hat.noise_mean)};
}

// 12
Outcome determinism(const std::filesystem::path& config)
{
    const auto start = std::chrono::steady_clock::now();
    const auto dir = std::filesystem::temp_directory_path();
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "4", "1"}) {
        ::setenv("MOLCHAN_THREADS", threads, 1);
        const std::string path = (dir / (std::string("molchan_acceptance_") + std::to_string(outputs.size()) + ".csv")).string();
        const std::string cfg = config.string();
        const char* argv[] = {"molchan", "experiment", "--config", cfg.c_str(), "--no-timing", "--out", path.c_str()};
        std::istringstream in;
        std::ostringstream out, err;
        if (cli::run(7, argv, in, out, err) != 0) return {false, "experiment failed: " + err.str()};
        std::ifstream file(path, std::ios::binary);
        std::stringstream text;
        text << file.rdbuf();
        outputs.push_back(text.str());
        std::filesystem::remove(path);
    }
    ::unsetenv("MOLCHAN_THREADS");
    const bool pass = outputs[0] == outputs[1] && outputs[0] == outputs[2] && !outputs[0].empty();
    return {pass, format("MOLCHAN_THREADS=1,4,1: %zu bytes each, identical=%s, %.1f s", outputs[0].size(),
                         pass ? "yes" : "no", seconds_since(start))};
}

}  // namespace

int main()
{
    const std::filesystem::path configs = MOLCHAN_CONFIG_DIR;
    const std::vector<Instance> instances = small_instances();
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"grouped ML exactness", grouped_ml},
        {"LSSE matches non-negative grid minimum", [&] { return lsse_grid(instances); }},
        {"ML dominates every non-negative grid point", [&] { return ml_grid(instances); }},
        {"CR bound closed form", cr_closed_form},
        {"ML and LSSE error reach the CR bound at K=100", cr_tightness},
        {"normalized error mean decreases with K", [&] { return mean_decreasing(configs / "repeated_base_mean.ini"); }},
        {"unconstrained LSSE error bound is tight", bound_tightness},
        {"optimal sequence search", table_search},
        {"crbound reports a singular Fisher matrix", singular_cli},
        {"Poisson channel statistics", channel_statistics},
        {"ISI-free estimator fixture", isi_free_fixture},
        {"experiment output is byte-identical across worker counts", [&] { return determinism(configs / "repeated_base_variance.ini"); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
