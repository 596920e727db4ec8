#ifndef SECDET_RATES_HPP
#define SECDET_RATES_HPP

#include "secdet/measures.hpp"

namespace secdet {

// Everything derived from one hypothesis pair: the large-deviation rate
// functions I0, I1 of the empirical log-likelihood-ratio mean under each
// hypothesis, their monotone-branch inverses, KL divergences and the
// Chernoff information C = I0(0) = I1(0).
//
// I_j(x) = sup_w { w x - log M_j(w) } is evaluated through the
// stationarity condition: psi_j(w) = (log M_j)'(w) is strictly
// increasing, so the maximizing tilt phi_j(x) is the unique root of
// psi_j(w) = x, found by bracketed bisection with Newton polishing.
class RateProfile {
public:
    explicit RateProfile(DistributionPair pair);

    const DistributionPair& pair() const { return pair_; }

    double d01() const { return d01_; }   // D(0||1)
    double d10() const { return d10_; }   // D(1||0)
    double dmin() const { return dmin_; }
    double chernoff() const { return c_; }
    double wstar() const { return wstar_; }

    double lambda_min() const { return lam_min_; }
    double lambda_max() const { return lam_max_; }

    // I_j(x); +inf outside [lambda_min, lambda_max], the finite
    // -log(point mass) value at the endpoints of a discrete pair
    double rate(int j, double x) const;
    double rate0(double x) const { return rate(0, x); }
    double rate1(double x) const { return rate(1, x); }

    // largest value attained on the invertible branch of I_j
    // (I0 on the increasing branch, I1 on the decreasing branch);
    // +inf for continuous pairs
    double rate_branch_sup(int j) const;

    // inv_rate(0, z) = max{x : I0(x) = z}  (increasing branch, x >= -d01)
    // inv_rate(1, z) = min{x : I1(x) = z}  (decreasing branch, x <= d10)
    double inv_rate(int j, double z) const;
    double inv_rate0(double z) const { return inv_rate(0, z); }
    double inv_rate1(double z) const { return inv_rate(1, z); }

    // I_j'(x) = phi_j(x), the maximizing tilt; RangeError outside the
    // open interior of the essential range
    double rate_derivative(int j, double x) const;

    // I_j evaluated after clamping x into the essential range; used by
    // detectors, where rounding can push a statistic a few ulps past an
    // endpoint
    double rate_clamped(int j, double x) const;

    // solver tolerances (module constants, overridable)
    struct Tolerances {
        double tilt_w = 1e-12;       // |dw| stop for the psi inversion
        double inverse_value = 1e-10;  // |I(x) - z| stop for branch inverses
        double degenerate_kl = 1e-12;
    };
    static Tolerances& tolerances();

private:
    double psi(int j, double w) const { return pair_.log_mgf_deriv(j, w); }
    double psi_deriv(int j, double w) const { return pair_.log_mgf_deriv2(j, w); }
    // solve psi_j(w) = x
    double tilt_for(int j, double x) const;

    DistributionPair pair_;
    double d01_ = 0, d10_ = 0, dmin_ = 0;
    double c_ = 0, wstar_ = 0;
    double lam_min_ = 0, lam_max_ = 0;
    // endpoint values -log(mass) for discrete pairs, indexed [j][min/max]
    double endpoint_rate_[2][2] = {{0, 0}, {0, 0}};
};

}  // namespace secdet

#endif
