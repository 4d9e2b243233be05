#include "fpa/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fpa/textio.hpp"

namespace fpa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double confidence_bonus(std::int64_t t, std::int64_t n_wins, double gamma) {
    if (n_wins <= 0) throw NoWinsYetError("confidence bonus undefined before the first win");
    if (t < 2) throw ProtocolViolationError("confidence bonus defined for t >= 2");
    return std::sqrt(gamma * std::log(static_cast<double>(t - 1)) / (2.0 * static_cast<double>(n_wins)));
}

void Strategy::observe(const Observation& obs) {
    if (obs.round != t_)
        throw ProtocolViolationError("observation for round " + std::to_string(obs.round) +
                                     " fed to a strategy at round " + std::to_string(t_));
    if (obs.won) {
        if (!obs.value) throw ProtocolViolationError("won observation without a value");
        ++n_wins_;
        value_sum_ += *obs.value;
    }
    if (obs.max_rival_bid) {
        auto it = std::lower_bound(rival_bids_.begin(), rival_bids_.end(), *obs.max_rival_bid);
        rival_bids_.insert(it, *obs.max_rival_bid);
    }
    on_observe(obs);
    ++t_;
}

// ---------------------------------------------------------------- UCBid1 ---

UCBid1::UCBid1(double gamma, DistModel F_known, int grid_n) : gamma_(gamma) {
    if (grid_n < 2) throw ConfigError("ucbid1: grid_n must be >= 2");
    DistModel F = std::move(F_known);
    grid_bids_.reserve(static_cast<size_t>(grid_n) + 1);
    grid_cdf_.reserve(static_cast<size_t>(grid_n) + 1);
    for (int i = 0; i <= grid_n; ++i) {
        double b = static_cast<double>(i) / grid_n;
        grid_bids_.push_back(b);
        grid_cdf_.push_back(cdf(F, b));
    }
}

Bid UCBid1::next_bid() {
    if (t_ == 1) return last_bid_ = 1.0;
    const double target = value_average() + bonus(gamma_);
    double best = -kInf;
    double bid = 0.0;
    for (size_t i = 0; i < grid_bids_.size(); ++i) {
        double val = (target - grid_bids_[i]) * grid_cdf_[i];
        if (val >= best) {
            best = val;
            bid = grid_bids_[i];
        }
    }
    return last_bid_ = bid;
}

// -------------------------------------------------------------- UCBid1+ ---

Bid UCBid1Plus::next_bid() {
    if (t_ == 1) return last_bid_ = 1.0;
    const auto& m = rival_bids_;
    const double n = static_cast<double>(m.size());
    const double target = value_average() + bonus(gamma_);

    // The empirical utility is linear and decreasing between observed bids,
    // so the maximizer lies on an observed bid (or at 0).
    double best = target * empirical_cdf(m, 0.0);
    double bid = 0.0;
    size_t i = 0;
    while (i < m.size() && m[i] <= target) {
        size_t j = i;
        while (j + 1 < m.size() && m[j + 1] == m[i]) ++j;
        double val = (target - m[i]) * static_cast<double>(j + 1) / n;
        if (val >= best) {
            best = val;
            bid = m[i];
        }
        i = j + 1;
    }
    return last_bid_ = bid;
}

// -------------------------------------------------------------- O-UCBid1 ---

Bid OUCBid1::next_bid() {
    if (t_ == 1) return last_bid_ = 1.0;
    const auto& m = rival_bids_;
    const double vh = value_average();
    const double eps = bonus(gamma_);
    const double target = vh + eps;

    auto u_hat = [&](double b) { return (vh - b) * empirical_cdf(m, b); };

    double max_u = u_hat(0.0);
    for (size_t i = 0; i < m.size();) {
        size_t j = i;
        while (j + 1 < m.size() && m[j + 1] == m[i]) ++j;
        max_u = std::max(max_u, u_hat(m[i]));
        i = j + 1;
    }
    const double threshold = max_u - 2.0 * eps;

    double bid = -1.0;
    auto consider = [&](double b) {
        if (b >= 0.0 && b <= target && u_hat(b) >= threshold && b > bid) bid = b;
    };
    consider(0.0);
    for (size_t i = 0; i < m.size() && m[i] <= target; ++i) consider(m[i]);
    consider(std::min(1.0, target));
    return last_bid_ = std::max(bid, 0.0);
}

// ---------------------------------------------------------------- Greedy ---

Bid Greedy::next_bid() {
    if (n_wins_ <= 3) return last_bid_ = 1.0;
    const auto& m = rival_bids_;
    const double vh = value_average();
    double best = vh * empirical_cdf(m, 0.0);
    double bid = 0.0;
    for (size_t i = 0; i < m.size();) {
        size_t j = i;
        while (j + 1 < m.size() && m[j + 1] == m[i]) ++j;
        double val = (vh - m[i]) * static_cast<double>(j + 1) / static_cast<double>(m.size());
        if (val >= best) {
            best = val;
            bid = m[i];
        }
        i = j + 1;
    }
    return last_bid_ = bid;
}

// -------------------------------------------------------------- Balanced ---

Bid Balanced::next_bid() {
    if (t_ == 1 || rival_bids_.empty()) return last_bid_ = 1.0;
    // lower median: order statistic ceil(n/2)
    size_t idx = (rival_bids_.size() - 1) / 2;
    return last_bid_ = rival_bids_[idx];
}

// -------------------------------------------------------------- UCB grid ---

UcbGrid::UcbGrid(int num_arms) {
    if (num_arms < 2) throw ConfigError("ucbgrid: need at least 2 arms");
    for (int i = 0; i < num_arms; ++i)
        arm_bids_.push_back(static_cast<double>(i) / (num_arms - 1));
    counts_.assign(arm_bids_.size(), 0);
    means_.assign(arm_bids_.size(), 0.0);
}

Bid UcbGrid::next_bid() {
    const int K = static_cast<int>(arm_bids_.size());
    if (t_ <= K) {
        last_arm_ = static_cast<int>(t_ - 1);
        return last_bid_ = arm_bids_[last_arm_];
    }
    double best = -kInf;
    int arm = 0;
    for (int i = 0; i < K; ++i) {
        double idx = means_[i] +
                     std::sqrt(2.0 * std::log(static_cast<double>(t_)) / static_cast<double>(counts_[i]));
        if (idx >= best) {
            best = idx;
            arm = i;
        }
    }
    last_arm_ = arm;
    return last_bid_ = arm_bids_[arm];
}

void UcbGrid::on_observe(const Observation& obs) {
    double r = obs.won ? (*obs.value - last_bid_) : 0.0;
    double r01 = 0.5 * (r + 1.0);  // rewards live in [-1,1]
    ++counts_[last_arm_];
    means_[last_arm_] += (r01 - means_[last_arm_]) / static_cast<double>(counts_[last_arm_]);
}

// ------------------------------------------------------------------- HOO ---

Hoo::Hoo(double rho, double nu1, std::int64_t horizon) : rho_(rho), nu1_(nu1) {
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("hoo: rho must lie in (0,1)");
    depth_cap_ = horizon > 1 ? static_cast<int>(std::floor(std::log2(static_cast<double>(horizon)))) : 0;
    nodes_.push_back({0.0, 1.0, 0, -1, -1, 0, 0.0, 0.0, nu1_, kInf});
}

Bid Hoo::next_bid() {
    path_.clear();
    int cur = 0;
    path_.push_back(cur);
    while (true) {
        if (nodes_[cur].count == 0 || nodes_[cur].depth >= depth_cap_) break;
        if (nodes_[cur].left < 0) {
            const double lo = nodes_[cur].lo, hi = nodes_[cur].hi;
            const int depth = nodes_[cur].depth;
            const double mid = 0.5 * (lo + hi);
            const double bonus = nodes_[cur].diameter_bonus * rho_;
            nodes_[cur].left = static_cast<int>(nodes_.size());
            nodes_[cur].right = static_cast<int>(nodes_.size()) + 1;
            nodes_.push_back({lo, mid, depth + 1, -1, -1, 0, 0.0, 0.0, bonus, kInf});
            nodes_.push_back({mid, hi, depth + 1, -1, -1, 0, 0.0, 0.0, bonus, kInf});
        }
        const Node& nd = nodes_[cur];
        // ties descend right, toward larger bids
        cur = nodes_[nd.right].b_value >= nodes_[nd.left].b_value ? nd.right : nd.left;
        path_.push_back(cur);
    }
    return last_bid_ = 0.5 * (nodes_[cur].lo + nodes_[cur].hi);
}

void Hoo::on_observe(const Observation& obs) {
    double r = obs.won ? (*obs.value - last_bid_) : 0.0;
    double r01 = 0.5 * (r + 1.0);
    for (int idx : path_) {
        Node& nd = nodes_[idx];
        ++nd.count;
        nd.mean += (r01 - nd.mean) / static_cast<double>(nd.count);
    }
    recompute_b_values();
}

void Hoo::recompute_b_values() {
    const double log_t = std::log(static_cast<double>(t_));
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
        Node& nd = nodes_[static_cast<size_t>(i)];
        double u = nd.count == 0 ? kInf
                                 : nd.mean +
                                       std::sqrt(2.0 * log_t / static_cast<double>(nd.count)) +
                                       nu1_ * std::pow(rho_, nd.depth);
        if (nd.left < 0)
            nd.b_value = u;
        else
            nd.b_value = std::min(u, std::max(nodes_[nd.left].b_value, nodes_[nd.right].b_value));
    }
}

// ---------------------------------------------------------------- StoSOO ---

StoSoo::StoSoo(std::int64_t horizon) : horizon_(std::max<std::int64_t>(1, horizon)) {
    const double T = static_cast<double>(horizon_);
    const double l = std::log(T);
    k_ = horizon_ < 3 ? horizon_ : static_cast<std::int64_t>(std::ceil(T / (l * l * l)));
    k_ = std::max<std::int64_t>(1, k_);
    depth_cap_ = horizon_ > 1 ? static_cast<int>(std::floor(std::log2(T))) : 0;
    nodes_.push_back({0.0, 1.0, 0, true, 0, 0.0});
    leaves_by_depth_.assign(static_cast<size_t>(depth_cap_) + 1, {});
    leaves_by_depth_[0].push_back(0);
    sweep_vmax_ = -kInf;
}

double StoSoo::b_value(const Node& n) const {
    if (n.count == 0) return kInf;
    const double T = static_cast<double>(horizon_);
    return n.mean + std::sqrt(std::log(T * T) / (2.0 * static_cast<double>(n.count)));
}

Bid StoSoo::next_bid() {
    int restarts = 0;
    while (true) {
        if (sweep_depth_ > depth_cap_) {
            sweep_depth_ = 0;
            sweep_vmax_ = -kInf;
            if (++restarts > 64) {
                // capacity exhausted (cannot happen for horizons actually
                // played); fall back to the root midpoint
                pending_node_ = 0;
                return last_bid_ = 0.5 * (nodes_[0].lo + nodes_[0].hi);
            }
        }
        auto& level = leaves_by_depth_[static_cast<size_t>(sweep_depth_)];
        if (level.empty()) {
            ++sweep_depth_;
            continue;
        }
        int best = level.front();
        double best_b = b_value(nodes_[static_cast<size_t>(best)]);
        for (int idx : level) {
            double b = b_value(nodes_[static_cast<size_t>(idx)]);
            double mid = 0.5 * (nodes_[static_cast<size_t>(idx)].lo + nodes_[static_cast<size_t>(idx)].hi);
            double best_mid = 0.5 * (nodes_[static_cast<size_t>(best)].lo + nodes_[static_cast<size_t>(best)].hi);
            if (b > best_b || (b == best_b && mid > best_mid)) {
                best = idx;
                best_b = b;
            }
        }
        if (best_b >= sweep_vmax_) {
            Node& nd = nodes_[static_cast<size_t>(best)];
            if (nd.count < k_) {
                sweep_vmax_ = best_b;
                ++sweep_depth_;
                pending_node_ = best;
                return last_bid_ = 0.5 * (nd.lo + nd.hi);
            }
            if (nd.depth < depth_cap_) {
                // expand: one node per depth per sweep
                const double lo = nd.lo, hi = nd.hi;
                const int depth = nd.depth;
                const double mid = 0.5 * (lo + hi);
                nd.leaf = false;
                level.erase(std::find(level.begin(), level.end(), best));
                nodes_.push_back({lo, mid, depth + 1, true, 0, 0.0});
                leaves_by_depth_[static_cast<size_t>(depth + 1)].push_back(
                    static_cast<int>(nodes_.size()) - 1);
                nodes_.push_back({mid, hi, depth + 1, true, 0, 0.0});
                leaves_by_depth_[static_cast<size_t>(depth + 1)].push_back(
                    static_cast<int>(nodes_.size()) - 1);
                sweep_vmax_ = best_b;
            }
        }
        ++sweep_depth_;
    }
}

void StoSoo::on_observe(const Observation& obs) {
    double r = obs.won ? (*obs.value - last_bid_) : 0.0;
    double r01 = 0.5 * (r + 1.0);
    if (pending_node_ >= 0) {
        Node& nd = nodes_[static_cast<size_t>(pending_node_)];
        ++nd.count;
        nd.mean += (r01 - nd.mean) / static_cast<double>(nd.count);
        pending_node_ = -1;
    }
}

// ---------------------------------------------------------------- WinExp ---

WinExp::WinExp(int num_arms, double eta, std::uint64_t seed) : eta_(eta), rng_(seed) {
    if (num_arms < 2) throw ConfigError("winexp: need at least 2 arms");
    if (!(eta >= 0.0)) throw ConfigError("winexp: eta must be nonnegative");
    for (int i = 0; i < num_arms; ++i)
        arm_bids_.push_back(static_cast<double>(i) / (num_arms - 1));
    scores_.assign(arm_bids_.size(), 0.0);
    last_probs_.assign(arm_bids_.size(), 1.0 / static_cast<double>(arm_bids_.size()));
}

Bid WinExp::next_bid() {
    const size_t K = arm_bids_.size();
    double smax = *std::max_element(scores_.begin(), scores_.end());
    double z = 0.0;
    for (size_t i = 0; i < K; ++i) {
        last_probs_[i] = std::exp(eta_ * (scores_[i] - smax));
        z += last_probs_[i];
    }
    for (size_t i = 0; i < K; ++i) last_probs_[i] /= z;

    double u = rng_.next_uniform();
    double acc = 0.0;
    size_t arm = K - 1;
    for (size_t i = 0; i < K; ++i) {
        acc += last_probs_[i];
        if (u < acc) {
            arm = i;
            break;
        }
    }
    return last_bid_ = arm_bids_[arm];
}

void WinExp::on_observe(const Observation& obs) {
    if (!obs.won) return;  // nothing learnable: the value stayed hidden
    if (!obs.max_rival_bid)
        throw ProtocolViolationError("winexp needs the rival maximum disclosed");
    const double m = *obs.max_rival_bid;
    const double value = *obs.value;
    double q = 0.0;
    for (size_t i = 0; i < arm_bids_.size(); ++i)
        if (arm_bids_[i] >= m) q += last_probs_[i];
    if (q <= 0.0) return;
    for (size_t i = 0; i < arm_bids_.size(); ++i)
        if (arm_bids_[i] >= m) scores_[i] += (value - arm_bids_[i]) / q;
}

// --------------------------------------------------------------- factory ---

namespace {

std::map<std::string, double> parse_kv(const std::string& body, const std::string& spec) {
    std::map<std::string, double> kv;
    if (trim(body).empty()) return kv;
    for (const auto& part : split(body, ',')) {
        size_t eq = part.find('=');
        if (eq == std::string::npos)
            throw ConfigError("strategy spec '" + spec + "': expected key=value, got '" + part + "'");
        kv[trim(part.substr(0, eq))] = parse_double(part.substr(eq + 1), spec);
    }
    return kv;
}

double take(std::map<std::string, double>& kv, const std::string& key, double def,
            bool required, const std::string& spec) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (required) throw ConfigError("strategy spec '" + spec + "': missing " + key);
        return def;
    }
    double v = it->second;
    kv.erase(it);
    return v;
}

}  // namespace

std::unique_ptr<Strategy> make_strategy(const std::string& spec, std::int64_t horizon,
                                        const DistModel* maxbid_dist, std::uint64_t rng_seed) {
    const std::string s = trim(spec);
    size_t colon = s.find(':');
    const std::string head = colon == std::string::npos ? s : s.substr(0, colon);
    auto kv = parse_kv(colon == std::string::npos ? "" : s.substr(colon + 1), s);

    std::unique_ptr<Strategy> out;
    if (head == "ucbid1") {
        if (!maxbid_dist) throw ConfigError("ucbid1 needs a known max-bid distribution");
        double gamma = take(kv, "gamma", 1.0, false, s);
        double grid = take(kv, "grid", 10000.0, false, s);
        out = std::make_unique<UCBid1>(gamma, *maxbid_dist, static_cast<int>(grid));
    } else if (head == "ucbid1plus") {
        out = std::make_unique<UCBid1Plus>(take(kv, "gamma", 1.0, false, s));
    } else if (head == "oucbid1") {
        out = std::make_unique<OUCBid1>(take(kv, "gamma", 1.0, false, s));
    } else if (head == "greedy") {
        out = std::make_unique<Greedy>();
    } else if (head == "balanced") {
        out = std::make_unique<Balanced>();
    } else if (head == "ucbgrid") {
        out = std::make_unique<UcbGrid>(static_cast<int>(take(kv, "k", 0.0, true, s)));
    } else if (head == "hoo") {
        double rho = take(kv, "rho", 0.5, false, s);
        double nu1 = take(kv, "nu1", 1.0, false, s);
        out = std::make_unique<Hoo>(rho, nu1, horizon);
    } else if (head == "stosoo") {
        out = std::make_unique<StoSoo>(horizon);
    } else if (head == "winexp") {
        int k = static_cast<int>(take(kv, "k", 0.0, true, s));
        double eta = take(kv, "eta", 0.0, true, s);
        out = std::make_unique<WinExp>(k, eta, rng_seed);
    } else if (head == "constant") {
        double b = take(kv, "b", 0.0, true, s);
        if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("constant: b must lie in [0,1]");
        out = std::make_unique<ConstantBid>(b);
    } else {
        throw ConfigError("unknown strategy spec: '" + s + "'");
    }
    if (!kv.empty())
        throw ConfigError("strategy spec '" + s + "': unknown key '" + kv.begin()->first + "'");
    return out;
}

bool strategy_needs_rival_bids(const std::string& spec) {
    const std::string s = trim(spec);
    const std::string head = s.substr(0, s.find(':'));
    return head == "ucbid1plus" || head == "oucbid1" || head == "greedy" || head == "balanced" ||
           head == "winexp";
}

}  // namespace fpa
