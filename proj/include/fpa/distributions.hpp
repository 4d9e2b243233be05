#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fpa/errors.hpp"
#include "fpa/rng.hpp"

namespace fpa {

// Probability / quantile value in [0,1].
using Prob = double;
// Bid value in [0,1].
using Bid = double;

class DistModel;

struct Uniform {};

struct BetaDist {
    double alpha = 1.0;  // > 0
    double beta = 1.0;   // > 0
};

// Exponential with the given rate, conditioned on [0,1].
struct TruncatedExponential {
    double rate = 1.0;  // > 0
};

struct DiscreteAtoms {
    std::vector<double> support;  // ascending, in [0,1]
    std::vector<double> masses;   // positive, sum to 1
};

// CDF given by linear interpolation between knots (x_i, F_i).
// x ascending in [0,1], F nondecreasing, final F == 1.
// Below the first knot the CDF is 0 (a first knot with F_0 > 0 is an atom).
struct PiecewiseLinearCdf {
    std::vector<double> x;
    std::vector<double> F;
};

struct EmpiricalSamples {
    std::vector<double> values;  // sorted ascending, in [0,1], nonempty
};

struct Mixture {
    std::vector<double> weights;  // sum to 1 within 1e-12
    std::vector<DistModel> components;
};

/// A max-bid (or value) distribution on [0,1]. Immutable after construction;
/// concurrent reads are safe.
class DistModel {
public:
    using Variant = std::variant<Uniform, BetaDist, TruncatedExponential, Mixture,
                                 DiscreteAtoms, PiecewiseLinearCdf, EmpiricalSamples>;

    DistModel() : node_(Uniform{}) {}
    DistModel(Variant node);  // NOLINT: implicit by design, validates invariants

    const Variant& node() const { return node_; }

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&node_);
    }

    // True when the model admits a density (no atoms anywhere).
    bool has_density() const;
    // True for purely atomic models (DiscreteAtoms / EmpiricalSamples).
    bool is_atomic() const;
    // Left and right edges of the support.
    double support_lo() const;
    double support_hi() const;

private:
    Variant node_;
};

/// P(M <= x), right-continuous. Clamps x outside [0,1] to the boundary values.
Prob cdf(const DistModel& model, double x);

/// Density f(x) >= 0. Throws NoDensityError for atomic models.
double pdf(const DistModel& model, double x);

/// Generalized inverse inf{x : F(x) >= q} for q in (0,1].
/// q == 0 returns the left support edge so that inverse-transform sampling of
/// point masses is exact. Closed forms where available, otherwise bisection to
/// absolute tolerance 1e-10 (at most 60 iterations).
double inv_cdf(const DistModel& model, Prob q);

/// One draw distributed per the model. Inverse transform with exactly one
/// uniform per draw; a Mixture consumes one extra uniform for the component
/// choice (two total for a mixture of simple families).
double sample(const DistModel& model, RngStream& rng);

/// Expectation of the distribution (closed forms per family).
double mean(const DistModel& model);

struct RegularityVerdict {
    bool is_log_concave = false;
    // Largest normalized successive increase of f/F over the grid; strictly
    // negative when f/F is strictly decreasing everywhere on the grid.
    double max_violation = 0.0;
    int grid_size = 0;
    std::optional<std::string> analytic_rule_applied;
};

/// Tests strict log-concavity of F, i.e. f/F strictly decreasing on the
/// interior of the support. The grid puts `grid_n` points on the bulk of the
/// support and refines the first/last 1% geometrically (f/F diverges near the
/// left edge). For Beta models a sufficient analytic rule (alpha=1 & beta>1,
/// beta=1 & alpha>1, or alpha+beta < alpha*beta) certifies the verdict and is
/// cross-checked against the grid. Throws NoDensityError for atomic models.
RegularityVerdict check_log_concavity(const DistModel& model, int grid_n = 512);

/// Empirical CDF (1/n) * #{obs <= b} over ascending observations.
/// Right-continuous, O(log n). Throws EmptyObservationsError.
Prob empirical_cdf(const std::vector<double>& sorted_obs, double b);

/// Parses a textual distribution spec:
///   uniform | beta:A,B | texp:R | mix:W1*SPEC1+W2*SPEC2 |
///   discrete:@file (CSV support,mass) | empirical:@file (one value per line) |
///   plinear:@file (CSV x,F)
/// @-paths are resolved against base_dir. Throws ParseError / ValidationError.
DistModel parse_dist_spec(const std::string& spec, const std::string& base_dir = ".");

}  // namespace fpa
