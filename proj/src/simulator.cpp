#include "fpa/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "fpa/textio.hpp"

namespace fpa {

AuctionEnv AuctionEnv::make(DistModel value_dist, double v, DistModel maxbid_dist, bool reveal_m,
                            int oracle_grid_n) {
    const double mu = mean(value_dist);
    if (std::abs(mu - v) > 1e-9)
        throw ConfigError("value_mean " + format_g12(v) + " does not match the value distribution mean " +
                          format_g12(mu));
    AuctionEnv env;
    env.value_dist = std::move(value_dist);
    env.v = v;
    env.maxbid_dist = std::move(maxbid_dist);
    env.reveal_m = reveal_m;
    env.optimal = optimal_bid(v, env.maxbid_dist, oracle_grid_n);
    return env;
}

namespace {

// Core loop shared by the tracing and the aggregating entry points. The
// callback sees each completed step.
template <typename StepCb>
void play_rounds(const AuctionEnv& env, Strategy& strategy, std::int64_t T,
                 const std::vector<double>& values, const std::vector<double>& max_bids,
                 StepCb&& cb) {
    double cum_regret = 0.0;
    for (std::int64_t t = 1; t <= T; ++t) {
        const double value = values[static_cast<size_t>(t - 1)];
        const double m = max_bids[static_cast<size_t>(t - 1)];
        const double bid = strategy.next_bid();
        const bool won = m <= bid;

        Observation obs;
        obs.round = t;
        obs.won = won;
        if (won) obs.value = value;
        if (env.reveal_m) obs.max_rival_bid = m;

        const double inst_regret = env.optimal.u_star - utility(env.v, env.maxbid_dist, bid);
        cum_regret += inst_regret;
        cb(t, bid, m, won, value, inst_regret, cum_regret);
        strategy.observe(obs);
    }
}

void draw_environment(const AuctionEnv& env, std::int64_t T, RngStream& rng,
                      std::vector<double>& values, std::vector<double>& max_bids) {
    values.resize(static_cast<size_t>(T));
    max_bids.resize(static_cast<size_t>(T));
    for (std::int64_t t = 0; t < T; ++t) {
        values[static_cast<size_t>(t)] = sample(env.value_dist, rng);
        max_bids[static_cast<size_t>(t)] = sample(env.maxbid_dist, rng);
    }
}

std::vector<double> quantile_triplet(std::vector<double> xs) {
    // mean, q25, q75 with linear interpolation between order statistics
    std::sort(xs.begin(), xs.end());
    auto quant = [&](double q) {
        double pos = q * static_cast<double>(xs.size() - 1);
        size_t lo = static_cast<size_t>(pos);
        size_t hi = std::min(lo + 1, xs.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return xs[lo] + frac * (xs[hi] - xs[lo]);
    };
    double sum = 0.0;
    for (double x : xs) sum += x;
    return {sum / static_cast<double>(xs.size()), quant(0.25), quant(0.75)};
}

}  // namespace

TrialTrace run_trial(const AuctionEnv& env, Strategy& strategy, std::int64_t T, RngStream& env_rng) {
    if (T < 1) throw ValidationError("run_trial: T must be >= 1");
    if (strategy.round() != 1) throw ProtocolViolationError("run_trial: strategy must be fresh");
    if (strategy.needs_rival_bids() && !env.reveal_m)
        throw ConfigError("strategy '" + strategy.name() + "' needs the rival maximum disclosed");

    std::vector<double> values, max_bids;
    draw_environment(env, T, env_rng, values, max_bids);

    TrialTrace trace;
    trace.strategy = strategy.name();
    trace.steps.reserve(static_cast<size_t>(T));
    trace.cum_regret.reserve(static_cast<size_t>(T));
    play_rounds(env, strategy, T, values, max_bids,
                [&](std::int64_t t, double bid, double m, bool won, double value, double inst,
                    double cum) {
                    StepRecord rec;
                    rec.t = t;
                    rec.bid = bid;
                    rec.m = m;
                    rec.won = won;
                    if (won) rec.value_observed = value;
                    rec.inst_regret = inst;
                    trace.steps.push_back(rec);
                    trace.cum_regret.push_back(cum);
                    if (won) trace.realized_reward += value - bid;
                });
    return trace;
}

std::vector<std::int64_t> log_checkpoints(std::int64_t T, int count) {
    std::vector<std::int64_t> cps;
    for (int i = 0; i < count; ++i) {
        double x = std::exp(std::log(static_cast<double>(T)) * static_cast<double>(i) / (count - 1));
        cps.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(x))));
    }
    cps.push_back(T);
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    return cps;
}

RegretSummary run_monte_carlo(const AuctionEnv& env, const std::vector<std::string>& strategy_specs,
                              std::int64_t T, std::int64_t trials, std::uint64_t base_seed,
                              const std::vector<std::int64_t>& checkpoints, int n_threads) {
    if (trials < 1) throw ValidationError("run_monte_carlo: trials must be >= 1");
    if (checkpoints.empty()) throw ValidationError("run_monte_carlo: need at least one checkpoint");
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1 || checkpoints[i] > T)
            throw ValidationError("checkpoints must lie in [1, T]");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw ValidationError("checkpoints must be strictly ascending");
    }

    RegretSummary summary;
    summary.checkpoints = checkpoints;
    summary.horizon = T;
    summary.trials = trials;
    summary.strategies.resize(strategy_specs.size());
    for (size_t s = 0; s < strategy_specs.size(); ++s) {
        summary.strategies[s].spec = strategy_specs[s];
        summary.strategies[s].trials.resize(static_cast<size_t>(trials));
    }

    // One task per trial: draw the shared environment sequence once, then run
    // every strategy on it. Results land in per-(strategy, trial) slots, so
    // the outcome does not depend on the thread count.
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        std::vector<double> values, max_bids;
        for (std::int64_t trial; (trial = next.fetch_add(1)) < trials;) {
            RngStream env_rng(
                derive_seed(base_seed, {kEnvStreamTag, static_cast<std::uint64_t>(trial)}));
            draw_environment(env, T, env_rng, values, max_bids);
            for (size_t s = 0; s < strategy_specs.size(); ++s) {
                auto strategy = make_strategy(
                    strategy_specs[s], T, &env.maxbid_dist,
                    derive_seed(base_seed, {kStrategyStreamTag, static_cast<std::uint64_t>(s),
                                            static_cast<std::uint64_t>(trial)}));
                if (strategy->needs_rival_bids() && !env.reveal_m)
                    throw ConfigError("strategy '" + strategy_specs[s] +
                                      "' needs the rival maximum disclosed");
                TrialStats stats;
                stats.cum_regret.resize(checkpoints.size(), 0.0);
                size_t cp_idx = 0;
                play_rounds(env, *strategy, T, values, max_bids,
                            [&](std::int64_t t, double, double, bool won, double, double,
                                double cum) {
                                if (won) {
                                    ++stats.wins_total;
                                    if (t > T / 2) ++stats.wins_second_half;
                                }
                                while (cp_idx < checkpoints.size() && checkpoints[cp_idx] == t) {
                                    stats.cum_regret[cp_idx] = cum;
                                    ++cp_idx;
                                }
                            });
                summary.strategies[s].trials[static_cast<size_t>(trial)] = std::move(stats);
            }
        }
    };
    n_threads = std::max(1, n_threads);
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (auto& strat : summary.strategies) {
        strat.mean_regret.resize(checkpoints.size());
        strat.q25_regret.resize(checkpoints.size());
        strat.q75_regret.resize(checkpoints.size());
        for (size_t c = 0; c < checkpoints.size(); ++c) {
            std::vector<double> xs;
            xs.reserve(strat.trials.size());
            for (const auto& tr : strat.trials) xs.push_back(tr.cum_regret[c]);
            auto mqq = quantile_triplet(std::move(xs));
            strat.mean_regret[c] = mqq[0];
            strat.q25_regret[c] = mqq[1];
            strat.q75_regret[c] = mqq[2];
        }
    }
    return summary;
}

void write_aggregate_csv(std::ostream& os, const RegretSummary& summary) {
    os << "strategy,t,mean_regret,q25_regret,q75_regret,trials\n";
    for (const auto& strat : summary.strategies)
        for (size_t c = 0; c < summary.checkpoints.size(); ++c)
            os << strat.spec << ',' << summary.checkpoints[c] << ',' << format_g12(strat.mean_regret[c])
               << ',' << format_g12(strat.q25_regret[c]) << ',' << format_g12(strat.q75_regret[c])
               << ',' << summary.trials << '\n';
}

void write_raw_csv(std::ostream& os, const RegretSummary& summary) {
    os << "strategy,trial,t,cum_regret\n";
    for (const auto& strat : summary.strategies)
        for (size_t i = 0; i < strat.trials.size(); ++i)
            for (size_t c = 0; c < summary.checkpoints.size(); ++c)
                os << strat.spec << ',' << i << ',' << summary.checkpoints[c] << ','
                   << format_g12(strat.trials[i].cum_regret[c]) << '\n';
}

}  // namespace fpa
