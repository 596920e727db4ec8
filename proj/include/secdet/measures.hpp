#ifndef SECDET_MEASURES_HPP
#define SECDET_MEASURES_HPP

#include <cstdint>
#include <vector>

#include "secdet/errors.hpp"
#include "secdet/rng.hpp"

namespace secdet {

// A binary hypothesis pair: the per-measurement law is nu when theta = 0
// and mu when theta = 1.  Immutable and freely shareable across threads;
// sampling takes an explicit caller-owned stream.
//
// Two concrete pairs ship:
//   bernoulli(p0, p1)          P_theta(y = 1) = p_theta on support {0, 1}
//   gaussian_shift(a, vbar, s) y = a*theta + v,  v ~ N(vbar, s^2)
class DistributionPair {
public:
    enum class Kind { Bernoulli, GaussianShift };

    static DistributionPair bernoulli(double p0, double p1);
    static DistributionPair gaussian_shift(double a, double vbar, double sigma);

    Kind kind() const { return kind_; }
    bool discrete() const { return kind_ == Kind::Bernoulli; }
    bool binary() const { return kind_ == Kind::Bernoulli; }

    // support points for discrete pairs ({0, 1} for Bernoulli)
    const std::vector<double>& support_points() const;
    // point mass of y under hypothesis theta (discrete pairs only)
    double point_mass(int theta, double y) const;

    double p0() const { return p0_; }
    double p1() const { return p1_; }
    double shift() const { return a_; }
    double noise_mean() const { return vbar_; }
    double noise_sigma() const { return sigma_; }

    // one i.i.d. draw from the hypothesis-theta law
    double sample(int theta, RngStream& rng) const;
    std::vector<double> sample(int theta, RngStream& rng, std::size_t count) const;

    // log-likelihood ratio log(dmu/dnu)(y); OutOfSupport for discrete
    // pairs when y is not a support point
    double llr(double y) const;
    // inverse of the log-likelihood ratio (continuous pairs only, where
    // the map y -> llr(y) is a bijection)
    double llr_inv(double lam) const;

    // log moment generating function of llr under hypothesis theta
    double log_mgf(int theta, double w) const;
    // first and second derivatives in w (mean / variance of llr under
    // the w-tilted law); exact closed forms for both built-in pairs
    double log_mgf_deriv(int theta, double w) const;
    double log_mgf_deriv2(int theta, double w) const;

    // essential range of llr: [lambda_min, lambda_max] for discrete
    // pairs, (-inf, +inf) for continuous ones
    double lambda_min() const;
    double lambda_max() const;

    // One draw from the exponentially tilted law.  The tilt parameter w
    // is always expressed on the nu side: theta = 0 samples
    // e^{w*llr} dnu / M0(w), theta = 1 samples e^{(w-1)*llr} dmu / M1(w-1)
    // (the two laws coincide, so one parameter serves both hypotheses).
    double sample_tilted(int theta, double w, RngStream& rng) const;
    // log of the per-draw importance weight d(true law)/d(tilted law)(y)
    double tilt_log_weight(int theta, double w, double y) const;

private:
    DistributionPair() = default;

    Kind kind_ = Kind::Bernoulli;
    double p0_ = 0, p1_ = 0;             // Bernoulli
    double a_ = 0, vbar_ = 0, sigma_ = 1;  // Gaussian shift
    double llr0_ = 0, llr1_ = 0;         // cached llr(0), llr(1) for Bernoulli
    std::vector<double> support_;
};

}  // namespace secdet

#endif
