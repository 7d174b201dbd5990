#include "molchan/channel.hpp"

#include <cmath>
#include <numbers>

#include <boost/random/poisson_distribution.hpp>

#include "molchan/error.hpp"
#include "molchan/rng.hpp"

namespace molchan {

double concentration_at(const PhysicalScenario& scenario, double distance, double t)
{
    if (!(t > 0.0)) throw DomainError("concentration requires t > 0");
    if (!(distance > 0.0)) throw DomainError("concentration requires a positive distance");
    const double spread = 4.0 * scenario.diffusion_coeff * t;
    return static_cast<double>(scenario.n_tx) * std::pow(std::numbers::pi * spread, -1.5) *
           std::exp(-distance * distance / spread);
}

double peak_sample_time(const PhysicalScenario& scenario)
{
    scenario.validate();
    return scenario.mean_distance * scenario.mean_distance / (6.0 * scenario.diffusion_coeff);
}

Cir synthesize_cir(const PhysicalScenario& scenario, double distance)
{
    scenario.validate(true);
    const double volume = scenario.receiver_volume();
    const double t_smp = peak_sample_time(scenario);

    Cir cir;
    cir.taps.resize(static_cast<std::size_t>(scenario.num_taps));
    for (int l = 0; l < scenario.num_taps; ++l)
        cir.taps[static_cast<std::size_t>(l)] =
            volume * concentration_at(scenario, distance, l * scenario.symbol_duration + t_smp);
    cir.noise_mean = 0.5 * volume * concentration_at(scenario, scenario.mean_distance, t_smp);
    return cir;
}

Cir synthesize_cir(const PhysicalScenario& scenario)
{
    return synthesize_cir(scenario, scenario.mean_distance);
}

namespace {

// Tap l+1 over tap 1 at the mean distance for symbol duration t_sym.
double tail_ratio(const PhysicalScenario& scenario, int lag, double t_sym, double t_smp)
{
    const double d = scenario.mean_distance;
    return concentration_at(scenario, d, lag * t_sym + t_smp) / concentration_at(scenario, d, t_smp);
}

}  // namespace

SymbolParams choose_symbol_params(const PhysicalScenario& scenario, std::optional<int> num_taps, double threshold)
{
    scenario.validate();
    if (!(threshold > 0.0)) throw ConfigError("tap threshold must be positive");
    const double t_smp = peak_sample_time(scenario);

    if (num_taps) {
        const int taps = *num_taps;
        if (taps < 1) throw ConfigError("requested number of taps must be at least 1");
        double lo = 0.0;
        double hi = t_smp;
        int expansions = 0;
        while (tail_ratio(scenario, taps, hi, t_smp) >= threshold) {
            lo = hi;
            hi *= 2.0;
            if (++expansions > 200) throw ConfigError("tap decay criterion unreachable for the requested taps");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (tail_ratio(scenario, taps, mid, t_smp) < threshold)
                hi = mid;
            else
                lo = mid;
        }
        return {hi, taps};
    }

    if (!(scenario.symbol_duration > 0.0))
        throw ConfigError("symbol_duration must be set when the number of taps is chosen");
    constexpr int kMaxTaps = 100000;
    for (int taps = 1; taps <= kMaxTaps; ++taps)
        if (tail_ratio(scenario, taps, scenario.symbol_duration, t_smp) < threshold)
            return {scenario.symbol_duration, taps};
    throw ConfigError("tap decay criterion unreachable within " + std::to_string(kMaxTaps) + " taps");
}

PhysicalScenario scenario_for_taps(const PhysicalScenario& scenario, int num_taps, double threshold)
{
    PhysicalScenario out = scenario;
    out.num_taps = num_taps;
    if (!(out.symbol_duration > 0.0))
        out.symbol_duration = choose_symbol_params(scenario, num_taps, threshold).symbol_duration;
    return out;
}

Eigen::VectorXd mean_observations(const Cir& cir, const TrainingSequence& seq)
{
    return design_matrix(seq, cir.num_taps()) * cir.as_vector();
}

ObservationVector simulate_observations(const Cir& cir, const TrainingSequence& seq, std::uint64_t rng_seed,
                                        std::uint64_t trial_index)
{
    if (!cir.non_negative()) throw ArgumentError("CIR entries must be non-negative");
    const Eigen::VectorXd means = mean_observations(cir, seq);
    auto rng = make_stream(rng_seed, trial_index, StreamLane::Observations);
    ObservationVector obs;
    obs.counts.resize(static_cast<std::size_t>(means.size()));
    for (Eigen::Index i = 0; i < means.size(); ++i) {
        const double mu = means(i);
        if (mu > 0.0) {
            boost::random::poisson_distribution<std::int64_t, double> poisson(mu);
            obs.counts[static_cast<std::size_t>(i)] = poisson(rng);
        }
    }
    return obs;
}

double draw_distance(const PhysicalScenario& scenario, std::uint64_t seed, std::uint64_t trial_index)
{
    if (scenario.distance_halfwidth == 0.0) return scenario.mean_distance;
    auto rng = make_stream(seed, trial_index, StreamLane::Distance);
    return scenario.mean_distance + (2.0 * rng.uniform01() - 1.0) * scenario.distance_halfwidth;
}

Cir mean_cir(const PhysicalScenario& scenario, std::uint64_t seed, int draws)
{
    if (scenario.distance_halfwidth == 0.0) return synthesize_cir(scenario);
    if (draws < 1) throw ArgumentError("prior mean needs at least one draw");
    auto rng = make_stream(seed, 0, StreamLane::Prior);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(scenario.num_taps + 1);
    for (int i = 0; i < draws; ++i) {
        const double d = scenario.mean_distance + (2.0 * rng.uniform01() - 1.0) * scenario.distance_halfwidth;
        sum += synthesize_cir(scenario, d).as_vector();
    }
    return Cir::from_vector(sum / draws);
}

}  // namespace molchan
