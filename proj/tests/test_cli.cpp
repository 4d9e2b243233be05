// CLI surface checks: exit codes and output shapes. These run only when the
// FPA_CLI environment variable points at the built binary (ctest sets it).
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "fpa/textio.hpp"

namespace {

const char* cli_path() { return std::getenv("FPA_CLI"); }

int run(const std::string& args, std::string* out = nullptr) {
    std::string cmd = std::string("'") + cli_path() + "' " + args + " > cli_test_out.txt 2> cli_test_err.txt";
    int rc = std::system(cmd.c_str());
    if (out) {
        std::ifstream f("cli_test_out.txt");
        std::ostringstream ss;
        ss << f.rdbuf();
        *out = ss.str();
    }
    std::remove("cli_test_out.txt");
    std::remove("cli_test_err.txt");
    return WEXITSTATUS(rc);
}

struct TempFile {
    std::string path;
    TempFile(const std::string& p, const std::string& contents) : path(p) {
        std::ofstream f(path);
        f << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli: oracle, check, ingest, simulate surfaces") {
    if (!cli_path()) {
        MESSAGE("FPA_CLI not set; skipping CLI surface checks");
        return;
    }

    SUBCASE("oracle prints a header and a data row") {
        std::string out;
        CHECK(run("oracle --dist uniform --value 0.5", &out) == 0);
        CHECK(out.rfind("b_star,q_star,u_star", 0) == 0);
    }

    SUBCASE("hopeless instance exits 4") {
        TempFile atoms("cli_high_atoms.csv", "support,mass\n0.6,0.5\n0.9,0.5\n");
        CHECK(run("oracle --dist discrete:@cli_high_atoms.csv --value 0.3") == 4);
    }

    SUBCASE("config validation failures exit 2") {
        TempFile cfg("cli_bad_cfg.json", R"({
            "horizon": 50, "trials": 2,
            "value_dist": "uniform", "value_mean": 0.5,
            "maxbid_dist": "uniform", "reveal_m": false,
            "strategies": ["ucbid1plus:gamma=1"], "checkpoints": [50]
        })");
        CHECK(run("simulate --config cli_bad_cfg.json") == 2);
        CHECK(run("simulate --config cli_no_such_file.json") == 2);
    }

    SUBCASE("lemma suite passes on the bundled instances") {
        std::string out;
        CHECK(run("check --suite lemmas", &out) == 0);
        CHECK(out.rfind("name,instance,slack,verdict", 0) == 0);
        CHECK(out.find("not-applicable") != std::string::npos);  // two-max rows
        CHECK(out.find("fail") == std::string::npos);
    }

    SUBCASE("concentration suite at reduced size") {
        std::string out;
        CHECK(run("check --suite concentration --mc 1000 --seed 7", &out) == 0);
        CHECK(out.find("local_dkw_coverage") != std::string::npos);
    }

    SUBCASE("ingest feeds the oracle end to end") {
        TempFile log("cli_bids.log", "1.0\n2.0\n3.0\n4.0\n5.0\n6.0\n7.0\n8.0\n9.0\n10.0\n");
        CHECK(run("ingest --in cli_bids.log --out cli_emp.txt --quantile 0.9") == 0);
        std::string out;
        CHECK(run("oracle --dist empirical:@cli_emp.txt --value 0.5", &out) == 0);
        CHECK(out.find("b_star") != std::string::npos);
        std::remove("cli_emp.txt");
    }

    SUBCASE("simulate writes an aggregate CSV with a header") {
        TempFile cfg("cli_sim_cfg.json", R"({
            "horizon": 200, "trials": 3,
            "value_dist": "uniform", "value_mean": 0.5,
            "maxbid_dist": "beta:1,6", "reveal_m": true,
            "strategies": ["ucbid1plus:gamma=1", "balanced"], "checkpoints": "log:10"
        })");
        CHECK(run("simulate --config cli_sim_cfg.json --seed 3 --out cli_sim_out.csv --raw cli_sim_raw.csv") == 0);
        auto agg = fpa::read_lines("cli_sim_out.csv");
        CHECK(agg.front() == "strategy,t,mean_regret,q25_regret,q75_regret,trials");
        auto raw = fpa::read_lines("cli_sim_raw.csv");
        CHECK(raw.front() == "strategy,trial,t,cum_regret");
        std::remove("cli_sim_out.csv");
        std::remove("cli_sim_raw.csv");
    }
}
