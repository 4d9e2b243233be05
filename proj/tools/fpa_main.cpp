// fpa: first-price auction bidding laboratory.
//
// Subcommands:
//   simulate  Monte-Carlo pseudo-regret runs from a JSON experiment config
//   oracle    optimal bid, utility and regularity constants for one instance
//   check     numeric lemma / concentration verification suites
//   ingest    normalize a raw bid log into the empirical:@file format
//
// Exit codes: 0 success, 2 config/usage error, 3 runtime error,
// 4 hopeless instance (the optimal bid never wins).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fpa/concentration.hpp"
#include "fpa/config.hpp"
#include "fpa/ingest.hpp"
#include "fpa/oracle.hpp"
#include "fpa/simulator.hpp"
#include "fpa/textio.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitHopeless = 4;

struct GlobalOpts {
    std::uint64_t seed = 0;
    int parallel = 0;  // 0: use hardware concurrency
};

int effective_threads(const GlobalOpts& g) {
    if (g.parallel > 0) return g.parallel;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int cmd_simulate(const GlobalOpts& g, const std::string& config_path, const std::string& out_path,
                 const std::string& raw_path, std::int64_t trials_override) {
    fpa::ExperimentConfig cfg = fpa::load_experiment_config(config_path);
    if (trials_override > 0) cfg.trials = trials_override;
    const std::string base_dir = std::filesystem::path(config_path).parent_path().string();
    fpa::AuctionEnv env = cfg.make_env(base_dir);

    fpa::RegretSummary summary =
        fpa::run_monte_carlo(env, cfg.strategies, cfg.horizon, cfg.trials, g.seed, cfg.checkpoints,
                             effective_threads(g));

    if (out_path.empty()) {
        fpa::write_aggregate_csv(std::cout, summary);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw fpa::ConfigError("cannot open output file: " + out_path);
        fpa::write_aggregate_csv(out, summary);
    }
    if (!raw_path.empty()) {
        std::ofstream raw(raw_path, std::ios::binary);
        if (!raw) throw fpa::ConfigError("cannot open output file: " + raw_path);
        fpa::write_raw_csv(raw, summary);
    }
    for (const auto& strat : summary.strategies)
        std::cerr << strat.spec << ": mean regret at T=" << cfg.horizon << " is "
                  << fpa::format_g12(strat.mean_regret.back()) << " (" << cfg.trials << " trials)\n";
    return kExitOk;
}

int cmd_oracle(const GlobalOpts&, const std::string& dist_spec, double value, int grid_n, double tol,
               double delta) {
    fpa::DistModel F = fpa::parse_dist_spec(dist_spec);
    fpa::OptimalBid ob = fpa::optimal_bid(value, F, grid_n, tol);

    std::ostringstream row;
    row << fpa::format_g12(ob.b_star) << ',' << fpa::format_g12(ob.q_star) << ','
        << fpa::format_g12(ob.u_star);
    std::string reg = "nan,nan,nan,nan,nan,nan";
    if (F.has_density()) {
        try {
            fpa::RegularityReport r = fpa::regularity_constants(value, F, delta);
            std::ostringstream rs;
            rs << fpa::format_g12(r.c_f) << ',' << fpa::format_g12(r.C_f) << ','
               << fpa::format_g12(r.lambda) << ',' << fpa::format_g12(r.delta) << ','
               << fpa::format_g12(r.alpha) << ','
               << fpa::format_g12(r.window_lo) << ';' << fpa::format_g12(r.window_hi);
            reg = rs.str();
        } catch (const fpa::Error&) {
            // regularity constants undefined for this window; report NaNs
        }
    }
    std::cout << "b_star,q_star,u_star,c_f,C_f,lambda,delta,alpha,window\n"
              << row.str() << ',' << reg << '\n';
    return kExitOk;
}

void print_check_row(std::ostream& os, const std::string& name, const std::string& instance,
                     double slack, const std::string& verdict) {
    os << name << ',' << instance << ',' << fpa::format_g12(slack) << ',' << verdict << '\n';
}

int cmd_check(const GlobalOpts& g, const std::string& suite, std::int64_t mc) {
    bool all_pass = true;
    std::cout << "name,instance,slack,verdict\n";

    if (suite == "lemmas" || suite == "all") {
        struct Inst {
            std::string label;
            double v;
            fpa::DistModel F;
        };
        std::vector<Inst> instances;
        instances.push_back({"uniform", 0.5, fpa::parse_dist_spec("uniform")});
        instances.push_back({"beta:1,6", 0.5, fpa::parse_dist_spec("beta:1,6")});
        instances.push_back({"beta:2,3", 0.5, fpa::parse_dist_spec("beta:2,3")});
        instances.push_back({"texp:2", 0.5, fpa::parse_dist_spec("texp:2")});
        auto two_max = fpa::make_two_max_instance();
        instances.push_back({"two_max", two_max.first, two_max.second});

        for (const auto& inst : instances) {
            for (const auto& check : fpa::lemma_suite(inst.v, inst.F, inst.label)) {
                std::string verdict = !check.applicable ? "not-applicable"
                                      : check.pass      ? "pass"
                                                        : "fail";
                if (check.applicable && !check.pass) all_pass = false;
                print_check_row(std::cout, check.lemma, check.instance, check.slack, verdict);
            }
        }
    }

    if (suite == "concentration" || suite == "all") {
        const fpa::DistModel uniform = fpa::parse_dist_spec("uniform");
        double cov = fpa::coverage_experiment(uniform, 0.4, 0.5, 1000, 0.05, mc, g.seed,
                                              effective_threads(g));
        bool pass = cov >= 0.95;
        all_pass = all_pass && pass;
        print_check_row(std::cout, "local_dkw_coverage", "uniform[0.4,0.5],t=1000,eta=0.05",
                        cov - 0.95, pass ? "pass" : "fail");

        double local = fpa::local_dkw_bound(10000, 0.40, 0.41, 0.05);
        double global = fpa::dkw_bound(10000, 0.05);
        pass = local < global;
        all_pass = all_pass && pass;
        print_check_row(std::cout, "local_below_global_dkw", "p=0.01,t=10000,eta=0.05",
                        global - local, pass ? "pass" : "fail");

        // monotonicity of the local bound in t and eta
        double worst = 1.0;
        for (std::int64_t t : {100, 1000, 10000})
            for (double eta : {0.01, 0.05, 0.2}) {
                worst = std::min(worst, fpa::local_dkw_bound(t, 0.4, 0.5, eta) -
                                            fpa::local_dkw_bound(4 * t, 0.4, 0.5, eta));
                worst = std::min(worst, fpa::local_dkw_bound(t, 0.4, 0.5, eta) -
                                            fpa::local_dkw_bound(t, 0.4, 0.5, eta * 1.5));
            }
        pass = worst > 0.0;
        all_pass = all_pass && pass;
        print_check_row(std::cout, "local_dkw_monotone", "t,eta grid", worst, pass ? "pass" : "fail");
    }

    if (suite != "lemmas" && suite != "concentration" && suite != "all")
        throw fpa::ConfigError("unknown suite '" + suite + "' (expected lemmas|concentration|all)");
    return all_pass ? kExitOk : kExitRuntime;
}

int cmd_ingest(const std::string& in_path, const std::string& out_path, double quantile) {
    fpa::EmpiricalSamples samples = fpa::load_and_normalize(in_path, quantile);
    fpa::write_empirical_file(out_path, samples.values);
    std::cerr << "wrote " << samples.values.size() << " normalized bids to " << out_path << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-price auction bidding laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "base seed for all randomness")->capture_default_str();
    app.add_option("--parallel", g.parallel, "worker threads (default: all cores)");

    auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo regret experiment");
    std::string config_path, out_path, raw_path;
    std::int64_t trials_override = 0;
    sim->add_option("--config", config_path, "JSON experiment config")->required();
    sim->add_option("--out", out_path, "aggregate CSV path (default: stdout)");
    sim->add_option("--raw", raw_path, "per-trial CSV path");
    sim->add_option("--trials", trials_override, "override the config's trial count");

    auto* orc = app.add_subcommand("oracle", "optimal bid and regularity constants");
    std::string dist_spec;
    double value = 0.5, tol = 1e-12, delta = 0.05;
    int grid_n = 100000;
    orc->add_option("--dist", dist_spec, "distribution spec")->required();
    orc->add_option("--value", value, "item value v")->required();
    orc->add_option("--grid", grid_n, "oracle grid resolution")->capture_default_str();
    orc->add_option("--tol", tol, "maximizer tie tolerance")->capture_default_str();
    orc->add_option("--delta", delta, "regularity window half-width")->capture_default_str();

    auto* chk = app.add_subcommand("check", "numeric verification suites");
    std::string suite = "all";
    std::int64_t mc = 10000;
    chk->add_option("--suite", suite, "lemmas|concentration|all")->capture_default_str();
    chk->add_option("--mc", mc, "Monte-Carlo repetitions")->capture_default_str();

    auto* ing = app.add_subcommand("ingest", "normalize a raw bid log");
    std::string in_path, ing_out;
    double quantile = 0.9;
    ing->add_option("--in", in_path, "raw bid log")->required();
    ing->add_option("--out", ing_out, "output empirical file")->required();
    ing->add_option("--quantile", quantile, "order-statistic cutoff")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(g, config_path, out_path, raw_path, trials_override);
        if (orc->parsed()) return cmd_oracle(g, dist_spec, value, grid_n, tol, delta);
        if (chk->parsed()) return cmd_check(g, suite, mc);
        if (ing->parsed()) return cmd_ingest(in_path, ing_out, quantile);
    } catch (const fpa::HopelessInstanceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitHopeless;
    } catch (const fpa::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fpa::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fpa::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
