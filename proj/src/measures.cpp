#include "secdet/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace secdet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(e^a + e^b) without overflow
double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -kInf) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace

DistributionPair DistributionPair::bernoulli(double p0, double p1) {
    if (!(p0 > 0.0 && p0 < 1.0) || !(p1 > 0.0 && p1 < 1.0))
        throw std::invalid_argument("bernoulli pair: p0, p1 must lie in (0,1)");
    if (p0 == p1)
        throw DegeneratePair("bernoulli pair: p0 == p1 makes the hypotheses indistinguishable");
    DistributionPair d;
    d.kind_ = Kind::Bernoulli;
    d.p0_ = p0;
    d.p1_ = p1;
    d.llr0_ = std::log((1.0 - p1) / (1.0 - p0));
    d.llr1_ = std::log(p1 / p0);
    d.support_ = {0.0, 1.0};
    return d;
}

DistributionPair DistributionPair::gaussian_shift(double a, double vbar, double sigma) {
    if (a == 0.0) throw std::invalid_argument("gaussian_shift pair: a must be nonzero");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_shift pair: sigma must be positive");
    DistributionPair d;
    d.kind_ = Kind::GaussianShift;
    d.a_ = a;
    d.vbar_ = vbar;
    d.sigma_ = sigma;
    return d;
}

const std::vector<double>& DistributionPair::support_points() const {
    if (!discrete()) throw UnsupportedPair("support_points: pair is continuous");
    return support_;
}

double DistributionPair::point_mass(int theta, double y) const {
    if (!discrete()) throw UnsupportedPair("point_mass: pair is continuous");
    const double p = theta == 0 ? p0_ : p1_;
    if (y == 1.0) return p;
    if (y == 0.0) return 1.0 - p;
    throw OutOfSupport("point_mass: value is not a support point");
}

double DistributionPair::sample(int theta, RngStream& rng) const {
    switch (kind_) {
        case Kind::Bernoulli:
            return rng.bernoulli(theta == 0 ? p0_ : p1_) ? 1.0 : 0.0;
        case Kind::GaussianShift:
            return a_ * theta + vbar_ + sigma_ * rng.normal();
    }
    return 0.0;
}

std::vector<double> DistributionPair::sample(int theta, RngStream& rng,
                                             std::size_t count) const {
    std::vector<double> out(count);
    for (auto& y : out) y = sample(theta, rng);
    return out;
}

double DistributionPair::llr(double y) const {
    switch (kind_) {
        case Kind::Bernoulli:
            if (y == 1.0) return llr1_;
            if (y == 0.0) return llr0_;
            throw OutOfSupport("llr: value is not in the Bernoulli support {0,1}");
        case Kind::GaussianShift: {
            // log dmu/dnu for N(vbar + a, s^2) vs N(vbar, s^2)
            const double s2 = sigma_ * sigma_;
            return a_ * (y - vbar_) / s2 - a_ * a_ / (2.0 * s2);
        }
    }
    return 0.0;
}

double DistributionPair::llr_inv(double lam) const {
    if (kind_ != Kind::GaussianShift)
        throw UnsupportedPair("llr_inv: only available for continuous pairs");
    const double s2 = sigma_ * sigma_;
    return vbar_ + (s2 / a_) * (lam + a_ * a_ / (2.0 * s2));
}

double DistributionPair::log_mgf(int theta, double w) const {
    switch (kind_) {
        case Kind::Bernoulli: {
            const double p = theta == 0 ? p0_ : p1_;
            return log_add(std::log1p(-p) + w * llr0_, std::log(p) + w * llr1_);
        }
        case Kind::GaussianShift: {
            // llr under theta is N((theta - 1/2) d, d) with d = a^2/s^2
            const double d = a_ * a_ / (sigma_ * sigma_);
            const double mean = (theta == 0 ? -0.5 : 0.5) * d;
            return mean * w + 0.5 * d * w * w;
        }
    }
    return 0.0;
}

double DistributionPair::log_mgf_deriv(int theta, double w) const {
    switch (kind_) {
        case Kind::Bernoulli: {
            const double p = theta == 0 ? p0_ : p1_;
            // softmax weight of the y=1 atom under the w-tilted law
            const double t0 = std::log1p(-p) + w * llr0_;
            const double t1 = std::log(p) + w * llr1_;
            const double q1 = 1.0 / (1.0 + std::exp(t0 - t1));
            return (1.0 - q1) * llr0_ + q1 * llr1_;
        }
        case Kind::GaussianShift: {
            const double d = a_ * a_ / (sigma_ * sigma_);
            return (theta == 0 ? -0.5 : 0.5) * d + d * w;
        }
    }
    return 0.0;
}

double DistributionPair::log_mgf_deriv2(int theta, double w) const {
    switch (kind_) {
        case Kind::Bernoulli: {
            const double p = theta == 0 ? p0_ : p1_;
            const double t0 = std::log1p(-p) + w * llr0_;
            const double t1 = std::log(p) + w * llr1_;
            const double q1 = 1.0 / (1.0 + std::exp(t0 - t1));
            const double diff = llr1_ - llr0_;
            return q1 * (1.0 - q1) * diff * diff;
        }
        case Kind::GaussianShift:
            return a_ * a_ / (sigma_ * sigma_);
    }
    return 0.0;
}

double DistributionPair::lambda_min() const {
    switch (kind_) {
        case Kind::Bernoulli:
            return std::min(llr0_, llr1_);
        case Kind::GaussianShift:
            return -kInf;
    }
    return 0.0;
}

double DistributionPair::lambda_max() const {
    switch (kind_) {
        case Kind::Bernoulli:
            return std::max(llr0_, llr1_);
        case Kind::GaussianShift:
            return kInf;
    }
    return 0.0;
}

double DistributionPair::sample_tilted(int theta, double w, RngStream& rng) const {
    const double u = theta == 0 ? w : w - 1.0;
    switch (kind_) {
        case Kind::Bernoulli: {
            const double p = theta == 0 ? p0_ : p1_;
            const double t0 = std::log1p(-p) + u * llr0_;
            const double t1 = std::log(p) + u * llr1_;
            const double q1 = 1.0 / (1.0 + std::exp(t0 - t1));
            return rng.bernoulli(q1) ? 1.0 : 0.0;
        }
        case Kind::GaussianShift:
            // tilting shifts the mean by u*a and keeps the variance
            return a_ * theta + u * a_ + vbar_ + sigma_ * rng.normal();
    }
    return 0.0;
}

double DistributionPair::tilt_log_weight(int theta, double w, double y) const {
    const double u = theta == 0 ? w : w - 1.0;
    return -u * llr(y) + log_mgf(theta, u);
}

}  // namespace secdet
