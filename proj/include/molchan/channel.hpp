#pragma once

#include <cstdint>
#include <optional>

#include "molchan/types.hpp"

namespace molchan {

/// Concentration of a point release in unbounded space, molecules/m^3:
/// N / (4 pi D t)^(3/2) * exp(-d^2 / (4 D t)). Throws DomainError for t <= 0 or d <= 0.
double concentration_at(const PhysicalScenario& scenario, double distance, double t);

/// Time of peak concentration at the mean distance, d^2 / (6 D).
double peak_sample_time(const PhysicalScenario& scenario);

/// Ground-truth CIR at the given transmitter-receiver distance.
///
/// Tap l is the receiver volume times the concentration at its centre,
/// sampled at (l - 1) * T_sym + T_smp, where T_smp is the peak time at the
/// mean distance. The noise mean is half the peak count at the mean distance,
/// independent of `distance`.
Cir synthesize_cir(const PhysicalScenario& scenario, double distance);

/// synthesize_cir at the scenario's mean distance.
Cir synthesize_cir(const PhysicalScenario& scenario);

struct SymbolParams {
    double symbol_duration = 0.0;
    int num_taps = 0;
};

inline constexpr double kDefaultTapThreshold = 0.1;

/// Picks symbol parameters so that tap L+1 falls below `threshold` * tap 1.
///
/// With `num_taps` set, returns the smallest symbol duration (to bisection
/// precision) meeting the criterion for that L. Otherwise keeps
/// scenario.symbol_duration and returns the smallest L meeting it.
/// Throws ConfigError when the criterion cannot be met.
SymbolParams choose_symbol_params(const PhysicalScenario& scenario, std::optional<int> num_taps,
                                  double threshold = kDefaultTapThreshold);

/// Copy of `scenario` with num_taps = L and the symbol duration chosen for L
/// (kept if scenario.symbol_duration is already positive).
PhysicalScenario scenario_for_taps(const PhysicalScenario& scenario, int num_taps,
                                   double threshold = kDefaultTapThreshold);

/// Expected counts r_bar[k] = sum_l c_l s[k-l+1] + c_n for k = L..K (equals S * c).
Eigen::VectorXd mean_observations(const Cir& cir, const TrainingSequence& seq);

/// Draws r[k] ~ Poisson(c^T s_k) for k = L..K from the stream keyed by
/// (rng_seed, trial_index). Same key, same counts.
ObservationVector simulate_observations(const Cir& cir, const TrainingSequence& seq,
                                        std::uint64_t rng_seed, std::uint64_t trial_index);

/// Transmitter-receiver distance for one trial: the mean distance when the
/// half-width is zero, otherwise mean + U[-halfwidth, halfwidth] drawn from the
/// distance lane of (seed, trial_index).
double draw_distance(const PhysicalScenario& scenario, std::uint64_t seed, std::uint64_t trial_index);

/// Prior mean E{c} estimated by averaging synthesize_cir over `draws` distances
/// from the prior lane of `seed`. Returns the deterministic CIR when the
/// half-width is zero.
Cir mean_cir(const PhysicalScenario& scenario, std::uint64_t seed, int draws = 10000);

}  // namespace molchan
