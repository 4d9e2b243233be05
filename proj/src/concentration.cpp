#include "fpa/concentration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "fpa/oracle.hpp"

namespace fpa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = 2.718281828459045;
}  // namespace

double dkw_bound(std::int64_t t, Prob eta) {
    if (t < 1) throw ValidationError("dkw_bound: t must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("dkw_bound: eta must lie in (0,1)");
    return std::sqrt(std::log(2.0 / eta) / (2.0 * static_cast<double>(t)));
}

double local_dkw_bound(std::int64_t t, Prob pa, Prob pb, Prob eta) {
    if (!(pb > pa)) throw DegenerateIntervalError("local_dkw_bound: need pb > pa");
    if (t < 2) throw ValidationError("local_dkw_bound: t must be >= 2");
    if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("local_dkw_bound: eta must lie in (0,1)");
    const double p = pb - pa;
    const double td = static_cast<double>(t);
    const double first = std::sqrt(2.0 * p * std::log(kE * std::sqrt(td) / (eta * std::sqrt(2.0 * p))) / td);
    const double second = std::log(td / (2.0 * p * eta * eta)) / (6.0 * td);
    return first + second;
}

ConcentrationReport coverage_one(const DistModel& F, double a, double b, std::int64_t t, Prob eta,
                                 std::uint64_t rep_seed) {
    const double Fa = cdf(F, a);
    const double Fb = cdf(F, b);
    if (!(Fb > Fa)) throw DegenerateIntervalError("coverage: F(b) must exceed F(a)");

    RngStream rng(rep_seed);
    std::vector<double> xs(static_cast<size_t>(t));
    for (auto& x : xs) x = sample(F, rng);
    std::sort(xs.begin(), xs.end());

    auto f_hat = [&](double x) {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        return static_cast<double>(it - xs.begin()) / static_cast<double>(t);
    };
    const double center = f_hat(a) - Fa;

    // The sup of the anchored deviation is attained at sample points or grid
    // edges; evaluate both.
    double sup = 0.0;
    constexpr int kGrid = 1000;
    for (int i = 0; i < kGrid; ++i) {
        double x = a + (b - a) * static_cast<double>(i) / (kGrid - 1);
        sup = std::max(sup, std::abs(f_hat(x) - cdf(F, x) - center));
    }
    for (auto it = std::lower_bound(xs.begin(), xs.end(), a);
         it != xs.end() && *it <= b; ++it)
        sup = std::max(sup, std::abs(f_hat(*it) - cdf(F, *it) - center));

    ConcentrationReport rep;
    rep.bound = local_dkw_bound(t, Fa, Fb, eta);
    rep.empirical_sup = sup;
    rep.covered = sup <= rep.bound;
    rep.eta = eta;
    rep.t = t;
    rep.a = a;
    rep.b = b;
    rep.prob_mass = Fb - Fa;
    return rep;
}

double coverage_experiment(const DistModel& F, double a, double b, std::int64_t t, Prob eta,
                           std::int64_t reps, std::uint64_t seed, int n_threads) {
    if (reps < 1) throw ValidationError("coverage_experiment: reps must be >= 1");
    const double Fa = cdf(F, a);
    const double Fb = cdf(F, b);
    if (!(Fb > Fa)) throw DegenerateIntervalError("coverage: F(b) must exceed F(a)");

    n_threads = std::max(1, n_threads);
    std::atomic<std::int64_t> next{0};
    std::atomic<std::int64_t> covered{0};
    auto worker = [&] {
        std::int64_t local = 0;
        for (std::int64_t rep; (rep = next.fetch_add(1)) < reps;) {
            auto r = coverage_one(F, a, b, t, eta,
                                  derive_seed(seed, {kRepStreamTag, static_cast<std::uint64_t>(rep)}));
            if (r.covered) ++local;
        }
        covered.fetch_add(local);
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return static_cast<double>(covered.load()) / static_cast<double>(reps);
}

namespace {

struct VGrid {
    std::vector<double> vs;
    std::vector<double> b_stars;  // NaN where the oracle rejects the value
};

VGrid optimal_bids_on_value_grid(const GridUtilityOracle& oracle) {
    VGrid g;
    for (int i = 1; i <= 50; ++i) {
        double v = static_cast<double>(i) / 50.0;
        g.vs.push_back(v);
        try {
            g.b_stars.push_back(oracle.optimal_bid(v).b_star);
        } catch (const HopelessInstanceError&) {
            g.b_stars.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return g;
}

}  // namespace

std::vector<LemmaCheck> lemma_suite(double v, const DistModel& F, const std::string& instance_label,
                                    int grid_n, double tol) {
    std::vector<LemmaCheck> out;
    GridUtilityOracle oracle(F, grid_n);

    bool log_concave = false;
    std::string gate_note;
    if (!F.has_density()) {
        gate_note = "not applicable: distribution has atoms";
    } else {
        log_concave = check_log_concavity(F).is_log_concave;
        if (!log_concave) gate_note = "not applicable: F is not log-concave";
    }

    auto add = [&](std::string lemma, bool applicable, bool pass, double slack, std::string note) {
        out.push_back({std::move(lemma), instance_label, applicable, pass, slack, std::move(note)});
    };
    auto skip = [&](const std::string& lemma) { add(lemma, false, true, 0.0, gate_note); };

    const VGrid grid = optimal_bids_on_value_grid(oracle);

    {  // monotone optimal-bid map, valid for every F
        double slack = kInf;
        for (size_t i = 0; i + 1 < grid.vs.size(); ++i) {
            if (std::isnan(grid.b_stars[i]) || std::isnan(grid.b_stars[i + 1])) continue;
            slack = std::min(slack, grid.b_stars[i + 1] - grid.b_stars[i]);
        }
        add("psi_nondecreasing", true, slack >= -tol, slack, "");
    }

    OptimalBid ob;
    bool have_ob = true;
    try {
        ob = oracle.optimal_bid(v);
    } catch (const HopelessInstanceError&) {
        have_ob = false;
    }

    {  // unique maximizer
        if (!log_concave || !have_ob) {
            skip("unique_maximizer");
        } else {
            // near-optimal scan-grid bids must form one contiguous cell;
            // closeness is relative to the best value on the same grid
            constexpr int kScan = 2000;
            std::vector<double> u(kScan + 1);
            double grid_max = -kInf;
            for (int i = 0; i <= kScan; ++i) {
                u[static_cast<size_t>(i)] = utility(v, F, static_cast<double>(i) / kScan);
                grid_max = std::max(grid_max, u[static_cast<size_t>(i)]);
            }
            int clusters = 0;
            bool in_cluster = false;
            for (int i = 0; i <= kScan; ++i) {
                bool close = grid_max - u[static_cast<size_t>(i)] <= 1e-9;
                if (close && !in_cluster) ++clusters;
                in_cluster = close;
            }
            add("unique_maximizer", true, clusters == 1, static_cast<double>(1 - clusters),
                clusters == 1 ? "" : "multiple near-optimal cells");
        }
    }

    {  // psi is 1-Lipschitz
        if (!log_concave) {
            skip("psi_lipschitz");
        } else {
            double slack = kInf;
            double prev_psi = psi(F, grid.vs.front());
            for (size_t i = 1; i < grid.vs.size(); ++i) {
                double cur = psi(F, grid.vs[i]);
                double dv = grid.vs[i] - grid.vs[i - 1];
                slack = std::min(slack, dv - std::abs(cur - prev_psi));
                prev_psi = cur;
            }
            add("psi_lipschitz", true, slack >= -tol, slack, "");
        }
    }

    {  // F(b*) >= F(v)/e
        if (!log_concave) {
            skip("win_prob_lower_bound");
        } else {
            double slack = kInf;
            for (size_t i = 0; i < grid.vs.size(); ++i) {
                if (std::isnan(grid.b_stars[i])) continue;
                slack = std::min(slack, cdf(F, grid.b_stars[i]) - cdf(F, grid.vs[i]) / kE);
            }
            add("win_prob_lower_bound", true, slack >= -tol, slack, "");
        }
    }

    {  // quadratic lower bound on the quantile-utility deviation
        if (!log_concave || !have_ob) {
            skip("quadratic_lower_bound");
        } else {
            double slack = kInf;
            for (int i = 0; i <= 200; ++i) {
                double q = static_cast<double>(i) / 200.0;
                double dev = ob.u_star - quantile_utility(v, F, q);
                slack = std::min(slack, dev - 0.25 * (ob.q_star - q) * (ob.q_star - q) * ob.u_star);
            }
            add("quadratic_lower_bound", true, slack >= -tol, slack, "");
        }
    }

    {  // sub-quadratic upper bound on a right window
        if (!log_concave || !have_ob) {
            skip("subquadratic_upper_bound");
        } else {
            try {
                double delta = std::min({0.05, ob.b_star > 0 ? ob.b_star / 2 : 0.05,
                                         (1.0 - ob.b_star) / 2});
                RegularityReport reg = regularity_constants(v, F, delta);
                double q_hi = std::min(1.0 - 1e-12, ob.q_star + reg.C_f * delta);
                double slack = kInf;
                for (int i = 0; i <= 50; ++i) {
                    double q = ob.q_star + (q_hi - ob.q_star) * static_cast<double>(i) / 50.0;
                    double dev = ob.u_star - quantile_utility(v, F, q);
                    slack = std::min(slack,
                                     reg.lambda / reg.c_f * (ob.q_star - q) * (ob.q_star - q) - dev);
                }
                add("subquadratic_upper_bound", true, slack >= -tol, slack, "");
            } catch (const Error& e) {
                add("subquadratic_upper_bound", false, true, 0.0,
                    std::string("not applicable: ") + e.what());
            }
        }
    }

    {  // phi' > 1
        if (!log_concave) {
            skip("phi_slope_above_one");
        } else {
            const double lo = F.support_lo(), hi = F.support_hi();
            const double w = hi - lo;
            double slack = kInf;
            double prev = 0.0;
            bool have_prev = false;
            for (int j = 1; j <= 512; ++j) {
                double x = lo + w * (0.01 + 0.98 * static_cast<double>(j) / 512.0);
                double p;
                try {
                    p = phi(F, x);
                } catch (const ZeroDensityError&) {
                    have_prev = false;
                    continue;
                }
                if (have_prev) {
                    double h = w * 0.98 / 512.0;
                    slack = std::min(slack, (p - prev) / h - 1.0);
                }
                prev = p;
                have_prev = true;
            }
            add("phi_slope_above_one", true, slack >= -std::max(tol, 1e-6), slack, "");
        }
    }

    return out;
}

}  // namespace fpa
