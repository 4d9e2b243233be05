#include "fpa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// phi with the removable singularity handled: at points where both f and F
// vanish the ratio tends to the bid itself for the families in scope.
double phi_safe(const DistModel& F, double b) {
    double f = pdf(F, b);
    double Fb = cdf(F, b);
    if (f <= 0.0) return Fb <= 0.0 ? b : kInf;
    return b + Fb / f;
}

void collect_atoms(const DistModel& model, std::vector<double>& out) {
    if (const auto* d = model.get_if<DiscreteAtoms>()) {
        out.insert(out.end(), d->support.begin(), d->support.end());
    } else if (const auto* e = model.get_if<EmpiricalSamples>()) {
        out.insert(out.end(), e->values.begin(), e->values.end());
    } else if (const auto* p = model.get_if<PiecewiseLinearCdf>()) {
        out.insert(out.end(), p->x.begin(), p->x.end());
    } else if (const auto* m = model.get_if<Mixture>()) {
        for (const auto& c : m->components) collect_atoms(c, out);
    }
}

struct GoldenResult {
    double x = 0.0;
    double val = -kInf;
};

// Golden-section maximization on [a,b]; tracks the best point seen, breaking
// exact ties toward the larger abscissa.
template <typename G>
GoldenResult golden_max(G&& g, double a, double b) {
    constexpr double kGolden = 0.6180339887498949;
    GoldenResult best;
    auto consider = [&](double x, double v) {
        if (v > best.val || (v == best.val && x > best.x)) best = {x, v};
    };
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = g(c), fd = g(d);
    consider(c, fc);
    consider(d, fd);
    for (int i = 0; i < 90 && b - a > 1e-14; ++i) {
        if (fc < fd) {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = g(d);
            consider(d, fd);
        } else {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = g(c);
            consider(c, fc);
        }
    }
    return best;
}

}  // namespace

double utility(double v, const DistModel& F, Bid b) { return (v - b) * cdf(F, b); }

double quantile_utility(double v, const DistModel& F, Prob q) {
    if (F.is_atomic()) throw NotInvertibleError("quantile_utility: atomic distribution");
    return utility(v, F, inv_cdf(F, q));
}

GridUtilityOracle::GridUtilityOracle(DistModel F, int grid_n) : F_(std::move(F)) {
    if (grid_n < 1000) throw ValidationError("optimal_bid: grid_n must be >= 1000");
    refine_ = F_.has_density();
    bids_.reserve(static_cast<size_t>(grid_n) + 1);
    for (int i = 0; i <= grid_n; ++i) bids_.push_back(static_cast<double>(i) / grid_n);
    collect_atoms(F_, bids_);
    std::sort(bids_.begin(), bids_.end());
    bids_.erase(std::unique(bids_.begin(), bids_.end()), bids_.end());
    cdf_vals_.reserve(bids_.size());
    for (double b : bids_) cdf_vals_.push_back(cdf(F_, b));
}

OptimalBid GridUtilityOracle::optimal_bid(double v, double tol) const {
    const size_t n = bids_.size();
    std::vector<double> u(n);
    double u_max = -kInf;
    double lip = 0.0;
    for (size_t i = 0; i < n; ++i) {
        u[i] = (v - bids_[i]) * cdf_vals_[i];
        u_max = std::max(u_max, u[i]);
        if (i > 0 && bids_[i] > bids_[i - 1])
            lip = std::max(lip, std::abs(u[i] - u[i - 1]) / (bids_[i] - bids_[i - 1]));
    }

    const double scale = std::max(1.0, std::abs(u_max));
    double w_max = 0.0;
    for (size_t k = 1; k < n; ++k) w_max = std::max(w_max, bids_[k] - bids_[k - 1]);
    // A cell interior can exceed its endpoints by at most lip * cell width;
    // every cluster within that margin of the grid maximum gets refined.
    double margin = tol * scale;
    if (refine_) margin = std::max(margin, 4.0 * lip * w_max);

    std::vector<GoldenResult> finalists;
    size_t i = 0;
    while (i < n) {
        if (u[i] < u_max - margin) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < n && u[j + 1] >= u_max - margin) ++j;
        // cluster [i, j]
        size_t best = i;
        for (size_t k = i; k <= j; ++k)
            if (u[k] > u[best] || (u[k] == u[best] && bids_[k] > bids_[best])) best = k;
        finalists.push_back({bids_[best], u[best]});
        if (refine_) {
            double lo = bids_[i > 0 ? i - 1 : 0];
            double hi = bids_[j + 1 < n ? j + 1 : n - 1];
            if (hi > lo) {
                auto g = [&](double b) { return utility(v, F_, b); };
                finalists.push_back(golden_max(g, lo, hi));
            }
        }
        i = j + 1;
    }

    double u_star = u_max;
    for (const auto& f : finalists) u_star = std::max(u_star, f.val);
    const double tie_tol = tol * std::max(1.0, std::abs(u_star));
    double b_star = -1.0;
    for (const auto& f : finalists)
        if (f.val >= u_star - tie_tol && f.x > b_star) b_star = f.x;

    OptimalBid out;
    out.b_star = b_star;
    out.q_star = cdf(F_, b_star);
    out.u_star = u_star;
    if (out.q_star < 1e-12)
        throw HopelessInstanceError("optimal bid wins with probability 0; best play is not to bid");
    return out;
}

OptimalBid optimal_bid(double v, const DistModel& F, int grid_n, double tol) {
    return GridUtilityOracle(F, grid_n).optimal_bid(v, tol);
}

double phi(const DistModel& F, Bid b) {
    double f = pdf(F, b);
    if (f <= 0.0) {
        if (cdf(F, b) <= 0.0) return b;
        throw ZeroDensityError("phi: density vanishes at b");
    }
    return b + cdf(F, b) / f;
}

Bid psi(const DistModel& F, double v) {
    const double lo = F.support_lo();
    const double hi = F.support_hi();
    // probe for monotonicity of phi before inverting it
    constexpr int kProbe = 65;
    double prev = -kInf;
    for (int j = 1; j <= kProbe; ++j) {
        double x = lo + (hi - lo) * static_cast<double>(j) / (kProbe + 1);
        double p = phi_safe(F, x);
        if (p < prev - 1e-9)
            throw AssumptionViolatedError("psi: phi is not monotone on the support");
        if (std::isfinite(p)) prev = p;
    }
    double a = lo, b = hi;
    for (int i = 0; i < 100 && b - a > 1e-15; ++i) {
        double mid = 0.5 * (a + b);
        if (phi_safe(F, mid) < v)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

RegularityReport regularity_constants(double v, const DistModel& F, double delta, int grid_n) {
    if (!(delta > 0.0)) throw ValidationError("regularity_constants: delta must be positive");
    OptimalBid ob = optimal_bid(v, F);

    RegularityReport rep;
    rep.delta = delta;
    rep.window_lo = std::max(0.0, ob.b_star - delta);
    rep.window_hi = std::min(1.0, ob.b_star + delta);
    rep.alpha = v - ob.b_star > 0.0 ? v / (v - ob.b_star) : kInf;

    double c_f = kInf, C_f = 0.0;
    for (int j = 0; j <= grid_n; ++j) {
        double x = rep.window_lo + (rep.window_hi - rep.window_lo) * static_cast<double>(j) / grid_n;
        double f = pdf(F, x);
        c_f = std::min(c_f, f);
        C_f = std::max(C_f, f);
    }
    if (!(c_f > 0.0)) throw ZeroDensityInWindowError("regularity_constants: density vanishes near b*");
    rep.c_f = c_f;
    rep.C_f = C_f;

    const double slope_hi = std::min(1.0, ob.b_star + delta);
    const double step = delta / grid_n;
    std::vector<double> ph;
    for (double x = ob.b_star; x <= slope_hi + 0.5 * step; x += step)
        ph.push_back(phi_safe(F, std::min(x, slope_hi)));
    double lambda = 0.0;
    if (ph.size() < 2) {
        rep.lambda = 0.0;
        return rep;
    }
    for (size_t j = 0; j < ph.size(); ++j) {
        double s;
        if (j == 0)
            s = (ph[1] - ph[0]) / step;
        else if (j + 1 == ph.size())
            s = (ph[j] - ph[j - 1]) / step;
        else
            s = (ph[j + 1] - ph[j - 1]) / (2.0 * step);
        lambda = std::max(lambda, s);
    }
    rep.lambda = lambda;
    return rep;
}

std::pair<double, DistModel> make_two_max_instance() {
    // Piecewise-linear CDF rising to b1 at a1*v, then steeply to b2 at a2*v,
    // flat to a3*v and up to (1,1). The printed construction's b2 exceeds 1,
    // so b2 is capped at 1 and b1 recomputed from the equal-maximum condition
    // U(v/2) = U(a2*v), i.e. b1 = 4*a1*(1-a2)*b2.
    const double v = 0.5;
    const double a1 = 29.0 / 32.0;
    const double a2 = 15.0 / 16.0;
    const double a3 = 1.5;
    const double b2 = std::min(128.0 / 29.0 * 0.5, 1.0);
    const double b1 = 4.0 * a1 * (1.0 - a2) * b2;
    PiecewiseLinearCdf p;
    p.x = {0.0, a1 * v, a2 * v, std::min(a3 * v, 1.0), 1.0};
    p.F = {0.0, b1, b2, 1.0, 1.0};
    return {v, DistModel(std::move(p))};
}

LowerBoundInstance make_lower_bound_instance(long long T, Prob A, double v) {
    if (T <= 16) throw InvalidHorizonError("lower bound instance requires T > 16");
    if (!(A > 0.0) || !(v > 0.0) || !(v < 1.0))
        throw ValidationError("lower bound instance requires A > 0 and v in (0,1)");
    LowerBoundInstance inst;
    inst.v = v;
    inst.delta_T = std::sqrt(v * (1.0 - v) / static_cast<double>(T));
    inst.Delta_T = A * inst.delta_T / (2.0 - 3.0 * inst.delta_T / v);
    inst.v_prime = v - inst.delta_T;
    const double m2 = A + 3.0 * inst.Delta_T / v;
    const double m3 = 1.0 - 2.0 * A - 3.0 * inst.Delta_T / v;
    if (!(m3 > 0.0)) throw ValidationError("lower bound instance: A too large for a valid CDF");
    DiscreteAtoms d;
    d.support = {v / 3.0, 2.0 * v / 3.0, 1.0};
    d.masses = {A, m2, m3};
    inst.F = DistModel(std::move(d));
    return inst;
}

}  // namespace fpa
