#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fpa/simulator.hpp"

using namespace fpa;

namespace {

DistModel bernoulli(double p) {
    DiscreteAtoms d;
    d.support = {0.0, 1.0};
    d.masses = {1.0 - p, p};
    return DistModel(std::move(d));
}

AuctionEnv instance1(bool reveal_m) {
    return AuctionEnv::make(bernoulli(0.5), 0.5, DistModel(BetaDist{1, 6}), reveal_m);
}

}  // namespace

TEST_CASE("run_trial closed forms with a constant bidder") {
    AuctionEnv env = AuctionEnv::make(bernoulli(0.5), 0.5, DistModel(Uniform{}), false);

    SUBCASE("bidding 1 loses 0.5625 per round") {
        ConstantBid s(1.0);
        RngStream rng(1);
        TrialTrace trace = run_trial(env, s, 4, rng);
        CHECK(trace.cum_regret.back() == doctest::Approx(2.25).epsilon(1e-9));
    }
    SUBCASE("bidding b* accrues no regret") {
        ConstantBid s(0.25);
        RngStream rng(1);
        TrialTrace trace = run_trial(env, s, 100, rng);
        CHECK(std::abs(trace.cum_regret.back()) <= 4e-9);
    }
}

TEST_CASE("point mass at zero wins every round") {
    DiscreteAtoms zero;
    zero.support = {0.0};
    zero.masses = {1.0};
    AuctionEnv env = AuctionEnv::make(bernoulli(0.5), 0.5, DistModel(zero), false);
    ConstantBid s(0.3);
    RngStream rng(7);
    TrialTrace trace = run_trial(env, s, 50, rng);
    for (const auto& step : trace.steps) CHECK(step.won);
}

TEST_CASE("pseudo-regret identity") {
    AuctionEnv env = instance1(true);
    auto strat = make_strategy("ucbid1plus:gamma=1", 500, &env.maxbid_dist, 0);
    RngStream rng(derive_seed(3, {kEnvStreamTag, 0}));
    TrialTrace trace = run_trial(env, *strat, 500, rng);

    double util_sum = 0.0;
    for (const auto& step : trace.steps) util_sum += utility(env.v, env.maxbid_dist, step.bid);
    CHECK(trace.cum_regret.back() ==
          doctest::Approx(500.0 * env.optimal.u_star - util_sum).epsilon(1e-6));

    // increments never negative beyond the oracle tolerance
    for (const auto& step : trace.steps) CHECK(step.inst_regret >= -1e-9);
}

TEST_CASE("environment invariants") {
    CHECK_THROWS_AS(AuctionEnv::make(bernoulli(0.5), 0.4, DistModel(Uniform{}), false), ConfigError);

    // strategies that need the rival maximum refuse to run blind
    AuctionEnv env = instance1(false);
    Balanced s;
    RngStream rng(1);
    CHECK_THROWS_AS(run_trial(env, s, 10, rng), ConfigError);
}

TEST_CASE("observation censoring follows the environment flags") {
    AuctionEnv env = instance1(false);
    ConstantBid s(0.25);
    RngStream rng(9);
    TrialTrace trace = run_trial(env, s, 200, rng);
    int wins = 0;
    for (const auto& step : trace.steps) {
        if (step.won) {
            ++wins;
            CHECK(step.value_observed.has_value());
        } else {
            CHECK_FALSE(step.value_observed.has_value());
        }
    }
    CHECK(wins > 0);
    CHECK(wins < 200);
}

TEST_CASE("monte carlo: determinism and common random numbers") {
    AuctionEnv env = instance1(true);
    std::vector<std::string> specs{"constant:b=0.25", "constant:b=0.25", "ucbid1plus:gamma=1"};
    auto cps = log_checkpoints(200, 20);

    RegretSummary one = run_monte_carlo(env, specs, 200, 8, 42, cps, 1);
    RegretSummary two = run_monte_carlo(env, specs, 200, 8, 42, cps, 4);

    std::ostringstream a, b;
    write_aggregate_csv(a, one);
    write_aggregate_csv(b, two);
    CHECK(a.str() == b.str());

    // identical specs see identical draws: identical summaries
    for (size_t c = 0; c < cps.size(); ++c)
        CHECK(one.strategies[0].mean_regret[c] == one.strategies[1].mean_regret[c]);

    std::ostringstream raw;
    write_raw_csv(raw, one);
    CHECK(raw.str().substr(0, raw.str().find('\n')) == "strategy,trial,t,cum_regret");
}

TEST_CASE("monte carlo: single trial collapses the quartiles onto the mean") {
    AuctionEnv env = instance1(true);
    auto cps = log_checkpoints(100, 10);
    RegretSummary s = run_monte_carlo(env, {"balanced"}, 100, 1, 5, cps, 1);
    for (size_t c = 0; c < cps.size(); ++c) {
        CHECK(s.strategies[0].mean_regret[c] == doctest::Approx(s.strategies[0].q25_regret[c]));
        CHECK(s.strategies[0].mean_regret[c] == doctest::Approx(s.strategies[0].q75_regret[c]));
    }
}

TEST_CASE("replaying a trial reproduces the stored bids exactly") {
    AuctionEnv env = instance1(true);
    auto once = [&](const std::string& spec) {
        auto s = make_strategy(spec, 300, &env.maxbid_dist, 99);
        RngStream rng(derive_seed(8, {kEnvStreamTag, 0}));
        return run_trial(env, *s, 300, rng);
    };
    for (const std::string spec : {"ucbid1plus:gamma=1", "oucbid1:gamma=1", "hoo:rho=0.5,nu1=1",
                                   "winexp:k=10,eta=0.01"}) {
        INFO(spec);
        TrialTrace a = once(spec);
        TrialTrace b = once(spec);
        REQUIRE(a.steps.size() == b.steps.size());
        for (size_t i = 0; i < a.steps.size(); ++i) CHECK(a.steps[i].bid == b.steps[i].bid);
    }
}

TEST_CASE("log checkpoints") {
    auto cps = log_checkpoints(10000, 100);
    CHECK(cps.front() == 1);
    CHECK(cps.back() == 10000);
    for (size_t i = 1; i < cps.size(); ++i) CHECK(cps[i] > cps[i - 1]);
    CHECK(cps.size() <= 101);
}
