#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpa/distributions.hpp"

namespace fpa {

struct ConcentrationReport {
    double bound = 0.0;
    double empirical_sup = 0.0;
    bool covered = false;
    double eta = 0.0;
    std::int64_t t = 0;
    double a = 0.0, b = 0.0;
    double prob_mass = 0.0;  // F(b) - F(a)
};

/// DKW radius: the eps with P(sup |F_hat - F| >= eps) <= 2 exp(-2 t eps^2) = eta.
double dkw_bound(std::int64_t t, Prob eta);

/// Local refinement on a sub-interval with probability mass p = pb - pa:
///   sqrt(2 p ln(e sqrt(t) / (eta sqrt(2 p))) / t) + ln(t / (2 p eta^2)) / (6 t).
/// Throws DegenerateIntervalError when pb <= pa.
double local_dkw_bound(std::int64_t t, Prob pa, Prob pb, Prob eta);

/// Monte-Carlo check of the local bound: draws t samples per repetition and
/// measures sup over [a,b] of |F_hat(x)-F(x)-(F_hat(a)-F(a))| against the
/// bound. Returns the fraction of repetitions covered. Repetitions use
/// derived seeds (seed, rep) and run in parallel without affecting results.
double coverage_experiment(const DistModel& F, double a, double b, std::int64_t t, Prob eta,
                           std::int64_t reps, std::uint64_t seed, int n_threads = 1);

/// One repetition of the experiment above, for diagnostics.
ConcentrationReport coverage_one(const DistModel& F, double a, double b, std::int64_t t, Prob eta,
                                 std::uint64_t rep_seed);

struct LemmaCheck {
    std::string lemma;
    std::string instance;
    bool applicable = true;
    bool pass = false;
    double slack = 0.0;  // worst-case margin; negative means violated
    std::string note;
};

/// Numeric checks of the structural lemmas for a given (v, F) pair:
/// monotone optimal-bid map, unique maximizer, 1-Lipschitz inverse, the
/// win-probability bound F(b*) >= F(v)/e, the quadratic lower and
/// sub-quadratic upper bounds on the quantile utility, and phi' > 1.
/// Checks whose assumptions fail are reported as not applicable.
std::vector<LemmaCheck> lemma_suite(double v, const DistModel& F, const std::string& instance_label,
                                    int grid_n = 100000, double tol = 1e-6);

}  // namespace fpa
