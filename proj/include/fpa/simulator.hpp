#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fpa/oracle.hpp"
#include "fpa/strategies.hpp"

namespace fpa {

// A stationary repeated first-price auction: i.i.d. item values with mean v
// and i.i.d. rival maxima distributed per maxbid_dist. reveal_m controls
// whether the rival maximum is disclosed after every round.
struct AuctionEnv {
    DistModel value_dist;
    double v = 0.0;
    DistModel maxbid_dist;
    bool reveal_m = false;
    OptimalBid optimal;

    // Validates that v matches the mean of value_dist (within 1e-9) and that
    // the instance is not hopeless; precomputes the optimal bid.
    static AuctionEnv make(DistModel value_dist, double v, DistModel maxbid_dist, bool reveal_m,
                           int oracle_grid_n = 100000);
};

struct StepRecord {
    std::int64_t t = 0;
    double bid = 0.0;
    double m = 0.0;
    bool won = false;
    std::optional<double> value_observed;
    double inst_regret = 0.0;
};

struct TrialTrace {
    std::string strategy;
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    std::vector<double> cum_regret;  // running pseudo-regret, one entry per step
    double realized_reward = 0.0;    // diagnostic only
};

/// Plays T rounds of one strategy against the environment. Per round the draw
/// order is fixed: value first, then rival maximum (the common-random-numbers
/// contract). Winning means M_t <= B_t; ties win.
TrialTrace run_trial(const AuctionEnv& env, Strategy& strategy, std::int64_t T, RngStream& env_rng);

struct TrialStats {
    std::vector<double> cum_regret;  // at the summary checkpoints
    std::int64_t wins_total = 0;
    std::int64_t wins_second_half = 0;
};

struct StrategySummary {
    std::string spec;
    std::vector<double> mean_regret;  // per checkpoint
    std::vector<double> q25_regret;
    std::vector<double> q75_regret;
    std::vector<TrialStats> trials;
};

struct RegretSummary {
    std::vector<std::int64_t> checkpoints;
    std::int64_t horizon = 0;
    std::int64_t trials = 0;
    std::vector<StrategySummary> strategies;
};

/// Monte-Carlo harness. Trial i draws its environment stream from
/// (base_seed, env, i) so every strategy sees identical (V_t, M_t) sequences
/// within a trial index; strategy-internal randomness streams from
/// (base_seed, strategy index, i). Trials run across n_threads with a
/// deterministic reduction: output is byte-identical for any thread count.
RegretSummary run_monte_carlo(const AuctionEnv& env, const std::vector<std::string>& strategy_specs,
                              std::int64_t T, std::int64_t trials, std::uint64_t base_seed,
                              const std::vector<std::int64_t>& checkpoints, int n_threads = 1);

/// `count` log-spaced round indices in [1, T], deduplicated, always ending at T.
std::vector<std::int64_t> log_checkpoints(std::int64_t T, int count = 100);

/// Aggregate CSV: strategy,t,mean_regret,q25_regret,q75_regret,trials.
void write_aggregate_csv(std::ostream& os, const RegretSummary& summary);

/// Raw per-trial CSV at the checkpoints: strategy,trial,t,cum_regret.
void write_raw_csv(std::ostream& os, const RegretSummary& summary);

}  // namespace fpa
