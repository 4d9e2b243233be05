#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpa/simulator.hpp"

namespace fpa {

// A simulate-command experiment: environment, strategy roster, horizon and
// aggregation checkpoints.
struct ExperimentConfig {
    std::string name;
    std::string description;
    std::int64_t horizon = 0;
    std::int64_t trials = 0;
    std::string value_dist_spec;
    double value_mean = 0.0;
    std::string maxbid_dist_spec;
    bool reveal_m = false;
    std::vector<std::string> strategies;
    std::vector<std::int64_t> checkpoints;

    AuctionEnv make_env(const std::string& base_dir) const;
};

/// Loads and validates a JSON experiment config. Strategy specs must parse;
/// strategies that need the rival maximum require reveal_m = true; value_mean
/// must match the value distribution mean. Relative @-paths inside
/// distribution specs resolve against the config file's directory.
/// Throws ConfigError / ParseError / ValidationError.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace fpa
