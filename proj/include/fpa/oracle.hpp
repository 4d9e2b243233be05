#pragma once

#include <utility>

#include "fpa/distributions.hpp"

namespace fpa {

// Optimal bid for (v, F): the largest maximizer of U(b) = (v-b)F(b), its win
// probability and value.
struct OptimalBid {
    Bid b_star = 0.0;
    Prob q_star = 0.0;
    double u_star = 0.0;
};

// Local regularity constants around the optimal bid.
struct RegularityReport {
    double c_f = 0.0;     // density lower bound on the window
    double C_f = 0.0;     // density upper bound on the window
    double lambda = 0.0;  // sup of phi' on [b*, b*+delta]
    double delta = 0.0;   // window half-width
    double alpha = 0.0;   // v / (v - b*)
    double window_lo = 0.0;
    double window_hi = 0.0;
};

/// First-price utility U(b) = (v-b) * F(b). May be negative.
double utility(double v, const DistModel& F, Bid b);

/// Utility as a function of the win quantile, W(q) = U(F^{-1}(q)).
/// Throws NotInvertibleError for atomic F.
double quantile_utility(double v, const DistModel& F, Prob q);

/// Largest maximizer of U over [0,1]: scans grid_n+1 equispaced bids plus all
/// atoms/knots of the model, then refines near-maximal cells by golden section
/// when F is continuous. Maximizers within tol*max(1,|u*|) of the best value
/// tie, and the largest bid wins. Throws HopelessInstanceError when F(b*) = 0.
OptimalBid optimal_bid(double v, const DistModel& F, int grid_n = 100000, double tol = 1e-12);

/// phi(b) = b + F(b)/f(b). Throws ZeroDensityError when f(b) = 0 with F(b) > 0.
double phi(const DistModel& F, Bid b);

/// Inverse of phi: the unique b with phi(b) = v, by bisection. Requires phi
/// increasing (log-concave F); throws AssumptionViolatedError when a probe
/// grid finds phi non-monotone.
Bid psi(const DistModel& F, double v);

/// Density bounds and phi-slope bound on a window of half-width delta around
/// the optimal bid. Throws ZeroDensityInWindowError when the density vanishes
/// in the window.
RegularityReport regularity_constants(double v, const DistModel& F, double delta, int grid_n = 512);

/// A value / piecewise-linear CDF pair whose utility has exactly two global
/// maximizers, at v/2 and a2*v.
std::pair<double, DistModel> make_two_max_instance();

struct LowerBoundInstance {
    double v = 0.0;
    double v_prime = 0.0;  // v - delta_T
    double delta_T = 0.0;
    double Delta_T = 0.0;
    DistModel F;
};

/// Three-atom environment for which values v and v-delta_T have optimal bids
/// on opposite sides of 2v/3, with utility gap Delta_T across that point.
/// Throws InvalidHorizonError when T <= 16.
LowerBoundInstance make_lower_bound_instance(long long T, Prob A, double v);

/// Utility maximization against a fixed F with the CDF precomputed on the bid
/// grid. Used where many values are optimized against one distribution.
class GridUtilityOracle {
public:
    GridUtilityOracle(DistModel F, int grid_n = 100000);

    OptimalBid optimal_bid(double v, double tol = 1e-12) const;
    const DistModel& dist() const { return F_; }

private:
    DistModel F_;
    bool refine_ = false;
    std::vector<double> bids_;
    std::vector<double> cdf_vals_;
};

}  // namespace fpa
