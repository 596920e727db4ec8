#include "secdet/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secdet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RateProfile::Tolerances& RateProfile::tolerances() {
    static Tolerances t;
    return t;
}

RateProfile::RateProfile(DistributionPair pair) : pair_(std::move(pair)) {
    // KLs are the llr means: D(1||0) = E_mu[llr] = psi_1(0), D(0||1) = -E_nu[llr] = -psi_0(0)
    d10_ = pair_.log_mgf_deriv(1, 0.0);
    d01_ = -pair_.log_mgf_deriv(0, 0.0);
    dmin_ = std::min(d01_, d10_);
    if (!(d01_ > tolerances().degenerate_kl) || !(d10_ > tolerances().degenerate_kl))
        throw DegeneratePair("build_profile: KL divergences vanish, nu == mu");

    lam_min_ = pair_.lambda_min();
    lam_max_ = pair_.lambda_max();

    if (pair_.discrete()) {
        for (int j = 0; j < 2; ++j) {
            double mass_min = 0.0, mass_max = 0.0;
            for (double y : pair_.support_points()) {
                const double l = pair_.llr(y);
                if (l == lam_min_) mass_min += pair_.point_mass(j, y);
                if (l == lam_max_) mass_max += pair_.point_mass(j, y);
            }
            endpoint_rate_[j][0] = -std::log(mass_min);
            endpoint_rate_[j][1] = -std::log(mass_max);
        }
    }

    // Chernoff information: log M0 is strictly convex with slope -d01 at
    // w=0 and +d10 at w=1, so its minimizer wstar lies in (0,1)
    wstar_ = tilt_for(0, 0.0);
    c_ = -pair_.log_mgf(0, wstar_);
}

double RateProfile::tilt_for(int j, double x) const {
    // bracket the root of psi_j(w) = x; psi_j is strictly increasing
    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (psi(j, lo) > x) {
        hi = lo;
        lo *= 2.0;
        if (++guard > 80) throw RangeError("tilt_for: x below the attainable llr range");
    }
    guard = 0;
    while (psi(j, hi) < x) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 80) throw RangeError("tilt_for: x above the attainable llr range");
    }

    // safeguarded Newton within [lo, hi]
    const double tol = tolerances().tilt_w;
    double w = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = psi(j, w) - x;
        if (f > 0.0)
            hi = w;
        else
            lo = w;
        const double dpsi = psi_deriv(j, w);
        double next = w - f / dpsi;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::fabs(next - w);
        w = next;
        if (step < tol * (1.0 + std::fabs(w))) break;
    }
    return w;
}

double RateProfile::rate(int j, double x) const {
    if (pair_.discrete()) {
        // snap near-endpoint arguments; I_j is continuous up to the endpoints
        const double snap = (lam_max_ - lam_min_) * 1e-12;
        if (x < lam_min_ - snap || x > lam_max_ + snap) return kInf;
        if (x <= lam_min_ + snap) return endpoint_rate_[j][0];
        if (x >= lam_max_ - snap) return endpoint_rate_[j][1];
    }
    const double w = tilt_for(j, x);
    // the transform is nonnegative (value 0 at w = 0); the solver can
    // land a few ulps below at the zeros
    return std::max(0.0, w * x - pair_.log_mgf(j, w));
}

double RateProfile::rate_clamped(int j, double x) const {
    return rate(j, std::clamp(x, lam_min_, lam_max_));
}

double RateProfile::rate_branch_sup(int j) const {
    if (!pair_.discrete()) return kInf;
    return j == 0 ? endpoint_rate_[0][1] : endpoint_rate_[1][0];
}

double RateProfile::inv_rate(int j, double z) const {
    if (z < 0.0) throw RangeError("inv_rate: z must be nonnegative");
    const double sup = rate_branch_sup(j);
    if (z > sup) throw RangeError("inv_rate: z exceeds the branch supremum");
    if (z == 0.0) return j == 0 ? -d01_ : d10_;

    // bracket on the monotone branch
    double lo, hi;
    if (j == 0) {
        lo = -d01_;
        if (pair_.discrete()) {
            hi = lam_max_;
        } else {
            double span = std::max(1.0, d10_ + d01_);
            hi = lo + span;
            while (rate(0, hi) < z) {
                span *= 2.0;
                hi = lo + span;
            }
        }
    } else {
        hi = d10_;
        if (pair_.discrete()) {
            lo = lam_min_;
        } else {
            double span = std::max(1.0, d10_ + d01_);
            lo = hi - span;
            while (rate(1, lo) < z) {
                span *= 2.0;
                lo = hi - span;
            }
        }
    }

    // bisection; on branch 0 the rate increases left to right, on
    // branch 1 it decreases
    const double vtol = tolerances().inverse_value;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        x = 0.5 * (lo + hi);
        const double v = rate(j, x);
        const double err = v - z;
        if (std::fabs(err) <= vtol && it > 4) break;
        const bool go_right = (j == 0) ? (v < z) : (v > z);
        if (go_right)
            lo = x;
        else
            hi = x;
        if (hi - lo < 1e-15 * (1.0 + std::fabs(x))) break;
    }
    return x;
}

double RateProfile::rate_derivative(int j, double x) const {
    if (!(x > lam_min_ && x < lam_max_))
        throw RangeError("rate_derivative: x outside the open essential range");
    return tilt_for(j, x);
}

}  // namespace secdet
