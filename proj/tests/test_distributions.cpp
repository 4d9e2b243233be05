#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fpa/distributions.hpp"

using namespace fpa;

namespace {

// The discrete max-bid instance used in the experiments: mass 0.51 at 0.1 and
// mass 0.01 at i/50 for i in {1..4, 6..50}.
DistModel paper_discrete_instance() {
    DiscreteAtoms d;
    for (int i = 1; i <= 50; ++i) {
        d.support.push_back(i / 50.0);
        d.masses.push_back(i == 5 ? 0.51 : 0.01);
    }
    return DistModel(std::move(d));
}

// independent oracle: direct mass summation
double discrete_cdf_oracle(const DiscreteAtoms& d, double x) {
    double acc = 0;
    for (size_t i = 0; i < d.support.size(); ++i)
        if (d.support[i] <= x) acc += d.masses[i];
    return acc;
}

double beta16_cdf(double x) { return 1.0 - std::pow(1.0 - x, 6); }

}  // namespace

TEST_CASE("cdf closed forms and the discrete instance") {
    CHECK(cdf(DistModel(Uniform{}), 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(cdf(DistModel(BetaDist{1, 6}), 0.5) == doctest::Approx(0.984375).epsilon(1e-12));

    DistModel disc = paper_discrete_instance();
    const auto& atoms = *disc.get_if<DiscreteAtoms>();
    CHECK(discrete_cdf_oracle(atoms, 0.1) == doctest::Approx(0.55));
    CHECK(cdf(disc, 0.1) == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(cdf(disc, 0.0199) == doctest::Approx(0.0));
    CHECK(cdf(disc, 1.0) == doctest::Approx(1.0));

    // clamping
    CHECK(cdf(DistModel(Uniform{}), -0.5) == 0.0);
    CHECK(cdf(DistModel(Uniform{}), 1.5) == 1.0);
}

TEST_CASE("pdf closed forms") {
    CHECK(pdf(DistModel(Uniform{}), 0.7) == doctest::Approx(1.0));
    CHECK(pdf(DistModel(BetaDist{1, 6}), 0.0) == doctest::Approx(6.0));
    Mixture mix;
    mix.weights = {0.5, 0.5};
    mix.components = {DistModel(Uniform{}), DistModel(Uniform{})};
    CHECK(pdf(DistModel(mix), 0.2) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pdf(paper_discrete_instance(), 0.1), NoDensityError);
}

TEST_CASE("inv_cdf closed forms and generalized inverse") {
    CHECK(inv_cdf(DistModel(Uniform{}), 0.3) == doctest::Approx(0.3));
    CHECK(inv_cdf(DistModel(BetaDist{1, 6}), 0.984375) == doctest::Approx(0.5).epsilon(1e-10));

    DistModel disc = paper_discrete_instance();
    // independent scan for the generalized inverse at q = 0.55
    const auto& atoms = *disc.get_if<DiscreteAtoms>();
    double expect = 1.0;
    for (size_t i = atoms.support.size(); i-- > 0;)
        if (discrete_cdf_oracle(atoms, atoms.support[i]) >= 0.55 - 1e-12) expect = atoms.support[i];
    CHECK(expect == doctest::Approx(0.1));
    CHECK(inv_cdf(disc, 0.55) == doctest::Approx(0.1));
    CHECK(inv_cdf(disc, 0.551) == doctest::Approx(0.12));
}

TEST_CASE("sampling follows the inverse-transform contract") {
    DiscreteAtoms point;
    point.support = {0.5};
    point.masses = {1.0};
    RngStream rng(7);
    CHECK(sample(DistModel(point), rng) == doctest::Approx(0.5));

    RngStream a(42), b(42);
    double u = b.next_uniform();
    CHECK(sample(DistModel(Uniform{}), a) == doctest::Approx(inv_cdf(DistModel(Uniform{}), u)));
}

TEST_CASE("Kolmogorov-Smirnov distance of Beta(1,6) draws vs the closed form") {
    DistModel beta(BetaDist{1, 6});
    const int n = 100000;
    RngStream rng(1234);
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample(beta, rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0;
    for (int i = 0; i < n; ++i) {
        double F = beta16_cdf(xs[i]);
        ks = std::max(ks, std::max(F - static_cast<double>(i) / n,
                                   static_cast<double>(i + 1) / n - F));
    }
    CHECK(ks < 0.01);
}

TEST_CASE("mixture sampling consumes exactly two uniforms") {
    Mixture mix;
    mix.weights = {0.3, 0.7};
    mix.components = {DistModel(Uniform{}), DistModel(BetaDist{2, 3})};
    DistModel m(mix);
    RngStream a(99), b(99);
    (void)sample(m, a);
    b.next_uniform();
    b.next_uniform();
    // both streams must now be in the same state
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("log-concavity verdicts") {
    auto uni = check_log_concavity(DistModel(Uniform{}), 512);
    CHECK(uni.is_log_concave);
    CHECK_FALSE(uni.analytic_rule_applied.has_value());

    auto b23 = check_log_concavity(DistModel(BetaDist{2, 3}), 512);
    CHECK(b23.is_log_concave);
    CHECK(b23.analytic_rule_applied.has_value());

    auto b16 = check_log_concavity(DistModel(BetaDist{1, 6}), 512);
    CHECK(b16.is_log_concave);
    CHECK(b16.analytic_rule_applied.has_value());

    CHECK(check_log_concavity(DistModel(TruncatedExponential{2.0}), 512).is_log_concave);

    CHECK_THROWS_AS(check_log_concavity(paper_discrete_instance(), 512), NoDensityError);
    CHECK_THROWS_AS(check_log_concavity(DistModel(Uniform{}), 8), ValidationError);
}

TEST_CASE("Beta analytic certificate implies the grid verdict") {
    // the analytic rule is sufficient: wherever it holds the grid must agree
    for (double a : {1.5, 2.0, 3.0, 5.0}) {
        for (double b : {1.5, 2.0, 3.0, 5.0}) {
            bool rule = a + b < a * b;
            auto verdict = check_log_concavity(DistModel(BetaDist{a, b}), 512);
            if (rule) {
                CHECK(verdict.analytic_rule_applied.has_value());
                CHECK(verdict.is_log_concave);
                CHECK(verdict.max_violation < -1e-12);  // numeric cross-check
            }
        }
    }
}

TEST_CASE("non-log-concave CDF is detected") {
    // flat CDF stretch: f/F is zero there, then jumps back up
    PiecewiseLinearCdf p;
    p.x = {0.0, 0.3, 0.6, 1.0};
    p.F = {0.0, 0.5, 0.5, 1.0};
    auto verdict = check_log_concavity(DistModel(p), 512);
    CHECK_FALSE(verdict.is_log_concave);
}

TEST_CASE("empirical_cdf") {
    CHECK(empirical_cdf({0.4}, 0.4) == doctest::Approx(1.0));
    CHECK(empirical_cdf({0.2, 0.4, 0.6}, 0.5) == doctest::Approx(2.0 / 3.0));
    CHECK(empirical_cdf({0.2, 0.4, 0.6}, 0.1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(empirical_cdf({}, 0.5), EmptyObservationsError);
}

TEST_CASE("cdf is nondecreasing for every family") {
    std::vector<DistModel> models;
    models.push_back(DistModel(Uniform{}));
    models.push_back(DistModel(BetaDist{1, 6}));
    models.push_back(DistModel(BetaDist{2, 3}));
    models.push_back(DistModel(TruncatedExponential{2.0}));
    models.push_back(paper_discrete_instance());
    models.push_back(DistModel(EmpiricalSamples{{0.1, 0.4, 0.4, 0.9}}));
    {
        PiecewiseLinearCdf p;
        p.x = {0.0, 0.25, 0.5, 1.0};
        p.F = {0.0, 0.4, 0.4, 1.0};
        models.push_back(DistModel(p));
    }
    models.push_back(parse_dist_spec("mix:0.5*beta:2,5+0.5*beta:5,2"));

    for (const auto& m : models) {
        double prev = -1.0;
        for (int i = 0; i <= 10000; ++i) {
            double c = cdf(m, i / 10000.0);
            CHECK(c >= prev);
            prev = c;
        }
        CHECK(cdf(m, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("inverse round trip for continuous strictly increasing families") {
    std::vector<DistModel> models;
    models.push_back(DistModel(Uniform{}));
    models.push_back(DistModel(BetaDist{1, 6}));
    models.push_back(DistModel(BetaDist{2, 3}));
    models.push_back(DistModel(TruncatedExponential{2.0}));
    models.push_back(parse_dist_spec("mix:0.5*beta:2,5+0.5*beta:5,2"));
    for (const auto& m : models) {
        for (int i = 1; i < 1000; ++i) {
            double q = i / 1000.0;
            CHECK(std::abs(cdf(m, inv_cdf(m, q)) - q) <= 1e-9);
        }
    }
}

TEST_CASE("mixture cdf is the weighted combination of its components") {
    // closed forms recomputed in the test
    DistModel mix = parse_dist_spec("mix:0.3*uniform+0.7*texp:2");
    auto texp_cdf = [](double x) { return -std::expm1(-2 * x) / -std::expm1(-2.0); };
    for (int i = 0; i <= 100; ++i) {
        double x = i / 100.0;
        CHECK(std::abs(cdf(mix, x) - (0.3 * x + 0.7 * texp_cdf(x))) <= 1e-12);
    }
}

TEST_CASE("empirical CDF concentrates at the DKW rate") {
    // sup-norm below sqrt(ln(2/0.01)/(2n)) in at least 99% of seeded reps
    const int n = 1000, reps = 1000;
    const double bound = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
    DistModel uni{Uniform{}};
    int covered = 0;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng(derive_seed(2024, {static_cast<std::uint64_t>(rep)}));
        std::vector<double> xs(n);
        for (auto& x : xs) x = sample(uni, rng);
        std::sort(xs.begin(), xs.end());
        double sup = 0;
        for (int i = 0; i < n; ++i) {
            sup = std::max(sup, std::abs(xs[i] - static_cast<double>(i) / n));
            sup = std::max(sup, std::abs(xs[i] - static_cast<double>(i + 1) / n));
        }
        if (sup <= bound) ++covered;
    }
    CHECK(covered >= static_cast<int>(0.99 * reps));
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(DistModel(BetaDist{-1, 2}), ValidationError);
    CHECK_THROWS_AS(DistModel(TruncatedExponential{0.0}), ValidationError);

    DiscreteAtoms bad;
    bad.support = {0.2, 0.1};
    bad.masses = {0.5, 0.5};
    CHECK_THROWS_AS(DistModel{bad}, ValidationError);

    DiscreteAtoms bad_mass;
    bad_mass.support = {0.2, 0.4};
    bad_mass.masses = {0.5, 0.6};
    CHECK_THROWS_AS(DistModel{bad_mass}, ValidationError);

    PiecewiseLinearCdf bad_final;
    bad_final.x = {0.0, 1.0};
    bad_final.F = {0.0, 0.9};
    CHECK_THROWS_AS(DistModel{bad_final}, ValidationError);

    Mixture bad_w;
    bad_w.weights = {0.5, 0.6};
    bad_w.components = {DistModel(Uniform{}), DistModel(Uniform{})};
    CHECK_THROWS_AS(DistModel{bad_w}, ValidationError);

    CHECK_THROWS_AS(DistModel(EmpiricalSamples{{}}), ValidationError);
}

TEST_CASE("distribution spec parsing") {
    CHECK(cdf(parse_dist_spec("uniform"), 0.3) == doctest::Approx(0.3));
    CHECK(parse_dist_spec("beta:1,6").get_if<BetaDist>()->beta == doctest::Approx(6.0));
    CHECK(parse_dist_spec("texp:2").get_if<TruncatedExponential>()->rate == doctest::Approx(2.0));

    auto mix = parse_dist_spec("mix:0.55*beta:500,2500+0.45*beta:1000,2000");
    REQUIRE(mix.get_if<Mixture>() != nullptr);
    CHECK(mix.get_if<Mixture>()->weights[0] == doctest::Approx(0.55));

    CHECK_THROWS_AS(parse_dist_spec("beta:1"), ParseError);
    CHECK_THROWS_AS(parse_dist_spec("nonsense"), ParseError);
    CHECK_THROWS_AS(parse_dist_spec("discrete:atoms.csv"), ParseError);

    // file-backed specs
    {
        std::ofstream f("test_atoms.csv");
        f << "support,mass\n0.2,0.5\n0.6,0.5\n";
    }
    auto disc = parse_dist_spec("discrete:@test_atoms.csv");
    CHECK(cdf(disc, 0.2) == doctest::Approx(0.5));
    {
        std::ofstream f("test_emp.txt");
        f << "0.25\n0.75\n";
    }
    auto emp = parse_dist_spec("empirical:@test_emp.txt");
    CHECK(cdf(emp, 0.5) == doctest::Approx(0.5));
    {
        std::ofstream f("test_plin.csv");
        f << "x,F\n0,0\n1,1\n";
    }
    auto plin = parse_dist_spec("plinear:@test_plin.csv");
    CHECK(cdf(plin, 0.3) == doctest::Approx(0.3));
    std::remove("test_atoms.csv");
    std::remove("test_emp.txt");
    std::remove("test_plin.csv");
}

TEST_CASE("means") {
    CHECK(mean(DistModel(Uniform{})) == doctest::Approx(0.5));
    CHECK(mean(DistModel(BetaDist{1, 6})) == doctest::Approx(1.0 / 7.0));
    DiscreteAtoms bern;
    bern.support = {0.0, 1.0};
    bern.masses = {0.5, 0.5};
    CHECK(mean(DistModel(bern)) == doctest::Approx(0.5));
    // truncated exponential mean against numeric quadrature of 1 - F
    DistModel te(TruncatedExponential{2.0});
    double quad = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) quad += (1.0 - cdf(te, (i + 0.5) / n)) / n;
    CHECK(mean(te) == doctest::Approx(quad).epsilon(1e-6));
}
