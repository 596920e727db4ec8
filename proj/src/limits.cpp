#include "secdet/limits.hpp"

#include <algorithm>
#include <cmath>

namespace secdet {

namespace {
// forgiveness for arguments sitting exactly on a domain boundary
constexpr double kEdgeTol = 1e-9;
}

TradeoffCurves::TradeoffCurves(RateProfile profile, NetworkShape shape)
    : profile_(std::move(profile)), shape_(shape) {
    shape_.validate();
}

double TradeoffCurves::h_branch0(double z) const {
    const double p = shape_.m - shape_.n;
    return p * profile_.rate0(profile_.inv_rate1(z / p));
}

double TradeoffCurves::h_branch1(double z) const {
    const double p = shape_.m - shape_.n;
    return p * profile_.rate1(profile_.inv_rate0(z / p));
}

double TradeoffCurves::h(double z) const {
    const double upper = (shape_.m - shape_.n) * profile_.dmin();
    if (!(z > 0.0 && z < upper))
        throw RangeError("h: z outside the open interval (0,(m-n)Dmin)");
    return std::min(h_branch0(z), h_branch1(z));
}

double TradeoffCurves::h_e(double z_s) const {
    const double cap = max_security();
    if (z_s < -kEdgeTol || z_s > cap + kEdgeTol)
        throw RangeError("h_e: z_s outside [0,(m-2n)+ C]");
    if (z_s <= 0.0) return max_efficiency();
    return std::min(max_efficiency(), h(std::min(z_s, cap)));
}

double TradeoffCurves::h_s(double z_e) const {
    const double cap = max_efficiency();
    if (z_e < -kEdgeTol || z_e > cap + kEdgeTol)
        throw RangeError("h_s: z_e outside [0, mC]");
    if (z_e <= 0.0) return 0.0;
    if (z_e >= (shape_.m - shape_.n) * profile_.dmin()) return 0.0;
    return std::min({z_e, max_security(), h(z_e)});
}

bool TradeoffCurves::is_admissible(double z_e, double z_s) const {
    if (z_s < 0.0 || z_s > max_security() + kEdgeTol) return false;
    if (z_s <= 0.0) return z_e <= max_efficiency() + kEdgeTol;
    return z_e <= h_e(std::min(z_s, max_security())) + kEdgeTol;
}

ErrorExponentCaps TradeoffCurves::exponent_caps(double z_e) const {
    if (z_e < 0.0) throw RangeError("exponent_caps: z_e must be nonnegative");
    ErrorExponentCaps caps;
    caps.eff_cap = max_efficiency();
    caps.sec_cap = max_security();
    if (z_e > 0.0 && z_e < (shape_.m - shape_.n) * profile_.dmin())
        caps.sec_given_eff = h(z_e);
    else
        caps.sec_given_eff = 0.0;
    return caps;
}

ErrorExponentCaps TradeoffCurves::secure_sensor_caps() const {
    if (shape_.n > shape_.m - shape_.m_s)
        throw ConfigError("secure_sensor_caps: n exceeds the number of normal sensors");
    ErrorExponentCaps caps;
    caps.eff_cap = max_efficiency();
    caps.sec_cap = std::max(shape_.surplus(), shape_.m_s) * profile_.chernoff();
    caps.sec_given_eff = 0.0;
    return caps;
}

double TradeoffCurves::h_tilde(int n_a, int n_a_prime, double z) const {
    if (n_a < 0 || n_a > shape_.n || n_a_prime < 0 || n_a_prime > shape_.n)
        throw RangeError("h_tilde: n_a, n_a' must lie in [0, n]");
    if (!(z > 0.0)) throw RangeError("h_tilde: z must be positive");
    const int remaining = shape_.m - (n_a + n_a_prime);
    if (remaining <= 0) return 0.0;
    const double zt = z / remaining;
    const double b0 = zt < profile_.d01() ? profile_.rate0(profile_.inv_rate1(zt)) : 0.0;
    const double b1 = zt < profile_.d10() ? profile_.rate1(profile_.inv_rate0(zt)) : 0.0;
    return remaining * std::min(b0, b1);
}

double TradeoffCurves::constrained_rate_min(int p, double z) const {
    if (p < 1) throw RangeError("constrained_rate_min: p must be positive");
    if (!(z > 0.0 && z <= p * profile_.d10()))
        throw RangeError("constrained_rate_min: z outside (0, p D(1||0)]");
    return p * profile_.rate1(profile_.inv_rate0(z / p));
}

bool is_symmetric_case(const RateProfile& profile, double tol) {
    const double s = profile.rate_derivative(0, 0.0) + profile.rate_derivative(1, 0.0);
    return std::fabs(s) <= tol;
}

}  // namespace secdet
