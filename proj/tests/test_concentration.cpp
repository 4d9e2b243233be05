#include <doctest.h>

#include <cmath>

#include "fpa/concentration.hpp"
#include "fpa/oracle.hpp"

using namespace fpa;

TEST_CASE("dkw bound closed form") {
    CHECK(dkw_bound(50, 2.0 * std::exp(-4.0)) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(dkw_bound(4000, 0.1) == doctest::Approx(0.5 * dkw_bound(1000, 0.1)).epsilon(1e-12));
    CHECK(dkw_bound(1000, 0.05) == doctest::Approx(std::sqrt(std::log(40.0) / 2000.0)).epsilon(1e-12));
    CHECK_THROWS_AS(dkw_bound(0, 0.1), ValidationError);
}

TEST_CASE("local dkw bound closed form") {
    // direct evaluation of the printed expression with p = 0.1
    const double t = 1000, p = 0.1, eta = 0.05;
    double expect = std::sqrt(2 * p * std::log(std::exp(1.0) * std::sqrt(t) / (eta * std::sqrt(2 * p))) / t) +
                    std::log(t / (2 * p * eta * eta)) / (6 * t);
    CHECK(local_dkw_bound(1000, 0.4, 0.5, 0.05) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(local_dkw_bound(1000, 0.4, 0.5, 0.05) == doctest::Approx(0.043048957188113895));

    CHECK_THROWS_AS(local_dkw_bound(1000, 0.5, 0.5, 0.05), DegenerateIntervalError);
}

TEST_CASE("local bound shrinks with the interval mass") {
    double b20 = local_dkw_bound(10000, 0.4, 0.6, 0.05);
    double b10 = local_dkw_bound(10000, 0.4, 0.5, 0.05);
    double b05 = local_dkw_bound(10000, 0.4, 0.45, 0.05);
    CHECK(b10 < b20);
    CHECK(b05 < b10);
}

TEST_CASE("local bound beats the global bound on small intervals") {
    CHECK(local_dkw_bound(10000, 0.40, 0.41, 0.05) < dkw_bound(10000, 0.05));
}

TEST_CASE("local bound is monotone decreasing in t and eta") {
    for (std::int64_t t : {100, 1000, 10000}) {
        for (double eta : {0.01, 0.05, 0.2}) {
            CHECK(local_dkw_bound(4 * t, 0.4, 0.5, eta) < local_dkw_bound(t, 0.4, 0.5, eta));
            CHECK(local_dkw_bound(t, 0.4, 0.5, eta * 1.5) < local_dkw_bound(t, 0.4, 0.5, eta));
        }
    }
}

TEST_CASE("full-interval bound matches its first-term closed form") {
    const double t = 1000, eta = 0.05;
    double full = local_dkw_bound(1000, 0.0, 1.0, eta);
    double first = std::sqrt(2.0 * std::log(std::exp(1.0) * std::sqrt(t) / (eta * std::sqrt(2.0))) / t);
    double second = std::log(t / (2.0 * eta * eta)) / (6.0 * t);
    CHECK(full == doctest::Approx(first + second).epsilon(1e-12));
}

TEST_CASE("coverage experiment") {
    DistModel uniform{Uniform{}};
    SUBCASE("single repetition is 0 or 1") {
        double c = coverage_experiment(uniform, 0.4, 0.5, 200, 0.05, 1, 3);
        CHECK((c == 0.0 || c == 1.0));
    }
    SUBCASE("coverage meets the stated confidence") {
        const std::int64_t reps = 1000;
        double c = coverage_experiment(uniform, 0.4, 0.5, 1000, 0.05, reps, 1, 2);
        CHECK(c >= 0.95);
        // binomial slack invariant
        CHECK(c >= 1.0 - 0.05 - 3.0 * std::sqrt(0.05 * 0.95 / reps));
    }
    SUBCASE("loose eta still covers at its level") {
        const std::int64_t reps = 400;
        double c = coverage_experiment(uniform, 0.3, 0.7, 500, 0.5, reps, 2, 2);
        CHECK(c >= 0.5);
    }
    SUBCASE("thread count does not change the estimate") {
        double c1 = coverage_experiment(uniform, 0.4, 0.5, 300, 0.1, 200, 11, 1);
        double c4 = coverage_experiment(uniform, 0.4, 0.5, 300, 0.1, 200, 11, 4);
        CHECK(c1 == c4);
    }
    SUBCASE("degenerate interval") {
        DiscreteAtoms flat;
        flat.support = {0.2};
        flat.masses = {1.0};
        CHECK_THROWS_AS(coverage_experiment(DistModel{flat}, 0.4, 0.5, 100, 0.05, 10, 1),
                        DegenerateIntervalError);
    }
}

TEST_CASE("lemma suite verdicts") {
    SUBCASE("uniform passes everything") {
        auto checks = lemma_suite(0.5, DistModel(Uniform{}), "uniform", 20000);
        CHECK(checks.size() >= 7);
        for (const auto& c : checks) {
            INFO(c.lemma);
            CHECK(c.applicable);
            CHECK(c.pass);
        }
    }
    SUBCASE("beta(1,6) passes everything") {
        for (const auto& c : lemma_suite(0.5, DistModel(BetaDist{1, 6}), "beta16", 20000)) {
            INFO(c.lemma);
            CHECK(c.applicable);
            CHECK(c.pass);
        }
    }
    SUBCASE("two-maximizer instance: assumption-gated checks are skipped") {
        auto [v, F] = make_two_max_instance();
        int skipped = 0;
        for (const auto& c : lemma_suite(v, F, "two_max", 20000)) {
            INFO(c.lemma);
            if (c.lemma == "psi_nondecreasing") {
                CHECK(c.applicable);
                CHECK(c.pass);
            } else {
                CHECK_FALSE(c.applicable);
                ++skipped;
            }
        }
        CHECK(skipped >= 5);
    }
}
