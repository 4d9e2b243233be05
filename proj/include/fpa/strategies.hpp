#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fpa/distributions.hpp"
#include "fpa/rng.hpp"

namespace fpa {

// What the bidder learns after one auction round. The value is censored: it
// is present exactly when the auction was won. The rival maximum is present
// only when the environment discloses it.
struct Observation {
    std::int64_t round = 0;
    bool won = false;
    std::optional<double> max_rival_bid;
    std::optional<double> value;
};

/// Confidence bonus sqrt(gamma * ln(t-1) / (2 * n_wins)); natural log.
/// Throws Error("no wins") when n_wins == 0.
double confidence_bonus(std::int64_t t, std::int64_t n_wins, double gamma);

/// A sequential bidding policy. next_bid() produces the bid for the current
/// round; observe() feeds the outcome back and advances the round counter.
/// Single-owner: one state per trial, never shared across threads.
class Strategy {
public:
    virtual ~Strategy() = default;

    virtual Bid next_bid() = 0;

    // Throws ProtocolViolationError when obs.round != current round.
    void observe(const Observation& obs);

    virtual std::string name() const = 0;
    // True when the policy needs the rival maximum disclosed every round.
    virtual bool needs_rival_bids() const { return false; }

    std::int64_t round() const { return t_; }
    std::int64_t wins() const { return n_wins_; }
    double value_average() const { return n_wins_ > 0 ? value_sum_ / static_cast<double>(n_wins_) : 0.0; }
    const std::vector<double>& rival_bids() const { return rival_bids_; }

protected:
    virtual void on_observe(const Observation& obs) { (void)obs; }

    double bonus(double gamma) const { return confidence_bonus(t_, n_wins_, gamma); }

    std::int64_t t_ = 1;  // next round index
    std::int64_t n_wins_ = 0;
    double value_sum_ = 0.0;
    std::vector<double> rival_bids_;  // sorted ascending
    double last_bid_ = 1.0;
};

// Bids the utility maximizer for the inflated value V_hat + eps against the
// known distribution F, on a fixed bid grid; first round bids 1.
class UCBid1 final : public Strategy {
public:
    UCBid1(double gamma, DistModel F_known, int grid_n = 10000);
    Bid next_bid() override;
    std::string name() const override { return "ucbid1"; }

private:
    double gamma_;
    std::vector<double> grid_bids_;
    std::vector<double> grid_cdf_;
};

// As UCBid1 but with the empirical CDF of observed rival maxima in place of
// F; the maximizer is located among the observed bids.
class UCBid1Plus final : public Strategy {
public:
    explicit UCBid1Plus(double gamma) : gamma_(gamma) {}
    Bid next_bid() override;
    std::string name() const override { return "ucbid1plus"; }
    bool needs_rival_bids() const override { return true; }

private:
    double gamma_;
};

// Overbidding variant: largest bid below V_hat + eps whose empirical utility
// stays within 2*eps of the empirical maximum.
class OUCBid1 final : public Strategy {
public:
    explicit OUCBid1(double gamma) : gamma_(gamma) {}
    Bid next_bid() override;
    std::string name() const override { return "oucbid1"; }
    bool needs_rival_bids() const override { return true; }

private:
    double gamma_;
};

// Bids the empirical-utility argmax once more than three values have been
// observed; bids 1 during the warm-up.
class Greedy final : public Strategy {
public:
    Bid next_bid() override;
    std::string name() const override { return "greedy"; }
    bool needs_rival_bids() const override { return true; }
};

// Bids the lower median of the observed rival maxima; wins about half the
// rounds regardless of the instance.
class Balanced final : public Strategy {
public:
    Bid next_bid() override;
    std::string name() const override { return "balanced"; }
    bool needs_rival_bids() const override { return true; }
};

// UCB1 over K equispaced bid arms; rewards (V-B)*1{won} rescaled to [0,1].
class UcbGrid final : public Strategy {
public:
    explicit UcbGrid(int num_arms);
    Bid next_bid() override;
    std::string name() const override { return "ucbgrid"; }

private:
    void on_observe(const Observation& obs) override;
    std::vector<double> arm_bids_;
    std::vector<std::int64_t> counts_;
    std::vector<double> means_;
    int last_arm_ = -1;
};

// Hierarchical optimistic optimization over the dyadic partition of [0,1];
// plays midpoints of the selected cells, tree depth capped at floor(log2 T).
class Hoo final : public Strategy {
public:
    Hoo(double rho, double nu1, std::int64_t horizon);
    Bid next_bid() override;
    std::string name() const override { return "hoo"; }

private:
    void on_observe(const Observation& obs) override;
    struct Node {
        double lo, hi;
        int depth;
        int left = -1, right = -1;
        std::int64_t count = 0;
        double mean = 0.0;
        double inv_sqrt_count = 0.0;
        double diameter_bonus = 0.0;  // nu1 * rho^depth
        double b_value = 0.0;
    };
    void recompute_b_values();
    double rho_, nu1_;
    int depth_cap_;
    std::vector<Node> nodes_;
    std::vector<int> path_;
};

// StoSOO over the same partition: every node is evaluated at its midpoint up
// to k = ceil(T / ln^3 T) times, at most one node expanded per depth per
// sweep, depth capped at floor(log2 T).
class StoSoo final : public Strategy {
public:
    explicit StoSoo(std::int64_t horizon);
    Bid next_bid() override;
    std::string name() const override { return "stosoo"; }
    std::int64_t evals_per_node() const { return k_; }

private:
    void on_observe(const Observation& obs) override;
    struct Node {
        double lo, hi;
        int depth;
        bool leaf = true;
        std::int64_t count = 0;
        double mean = 0.0;
    };
    double b_value(const Node& n) const;
    std::int64_t horizon_;
    std::int64_t k_;
    int depth_cap_;
    std::vector<Node> nodes_;
    std::vector<std::vector<int>> leaves_by_depth_;
    int sweep_depth_ = 0;
    double sweep_vmax_;
    int pending_node_ = -1;
};

// Exponential weights over K bid arms. On a win the full counterfactual
// reward vector is known (the rival max is disclosed); it is importance
// weighted by the probability of the winning arm set. Losses contribute zero
// estimates.
class WinExp final : public Strategy {
public:
    WinExp(int num_arms, double eta, std::uint64_t seed);
    Bid next_bid() override;
    std::string name() const override { return "winexp"; }
    bool needs_rival_bids() const override { return true; }

private:
    void on_observe(const Observation& obs) override;
    std::vector<double> arm_bids_;
    std::vector<double> scores_;
    std::vector<double> last_probs_;
    double eta_;
    RngStream rng_;
};

class ConstantBid final : public Strategy {
public:
    explicit ConstantBid(double b) : bid_(b) {}
    Bid next_bid() override {
        last_bid_ = bid_;
        return bid_;
    }
    std::string name() const override { return "constant"; }

private:
    double bid_;
};

/// Builds a strategy from a spec string:
///   ucbid1:gamma=G | ucbid1plus:gamma=G | oucbid1:gamma=G | greedy |
///   balanced | ucbgrid:k=K | hoo:rho=R,nu1=N | stosoo | winexp:k=K,eta=E |
///   constant:b=B
/// `horizon` feeds the horizon-dependent policies (hoo, stosoo); the anytime
/// policies ignore it. `maxbid_dist` must be non-null for ucbid1. `rng_seed`
/// seeds strategies with internal randomness. Throws ConfigError.
std::unique_ptr<Strategy> make_strategy(const std::string& spec, std::int64_t horizon,
                                        const DistModel* maxbid_dist, std::uint64_t rng_seed);

/// True when the spec names a policy that needs the rival maximum disclosed.
bool strategy_needs_rival_bids(const std::string& spec);

}  // namespace fpa
