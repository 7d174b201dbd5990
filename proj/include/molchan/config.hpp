#pragma once

#include <filesystem>
#include <istream>

#include "molchan/experiment.hpp"

namespace molchan {

/// Reads an INI-style configuration:
///
///   [scenario]
///   n_tx = 100000
///   diffusion_coeff = 4.365e-10
///   mean_distance = 500e-9
///   distance_halfwidth = 100e-9
///   receiver_radius = 45e-9
///   symbol_duration = 0        ; 0 = choose per L
///   num_taps = 1
///
///   [experiment]
///   sequence_source = repeated-base   ; repeated-base | isi-free | optimal-search | explicit
///   base_pattern = fig1-base          ; or literal bits
///   k0 = 1
///   bits = 1010
///   epsilon = 1e-9
///   estimators = ml, lsse
///   taps_list = 1, 3, 5
///   lengths_list = 10, 20, 30
///   num_trials = 100000
///   master_seed = 1
///   lsse_bound = false
///   tap_threshold = 0.1
///   prior_draws = 10000
///
/// Missing keys keep their defaults. Throws ConfigError on malformed input.
ExperimentSpec parse_experiment_config(std::istream& in);
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

/// Only the [scenario] section.
PhysicalScenario parse_scenario_config(std::istream& in);
PhysicalScenario load_scenario_config(const std::filesystem::path& path);

}  // namespace molchan
