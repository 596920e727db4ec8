#ifndef SECDET_LIMITS_HPP
#define SECDET_LIMITS_HPP

#include "secdet/rates.hpp"

namespace secdet {

// Sensor-network shape: m sensors total, up to n of them compromisable,
// m_s of them hardened against compromise.  m <= 2n is allowed; the
// limit evaluators then report zero security.
struct NetworkShape {
    int m = 1;
    int n = 0;
    int m_s = 0;

    void validate() const {
        if (m < 1) throw ConfigError("shape: m must be >= 1");
        if (n < 0 || m_s < 0) throw ConfigError("shape: n and m_s must be >= 0");
        if (n + m_s > m) throw ConfigError("shape: n + m_s must not exceed m");
    }
    int surplus() const { return std::max(0, m - 2 * n); }  // (m - 2n)+
};

struct ErrorExponentCaps {
    double eff_cap = 0;        // max efficiency, mC
    double sec_cap = 0;        // max security
    double sec_given_eff = 0;  // security bound at the given efficiency
};

// The efficiency/security trade-off geometry of one (pair, shape):
// the curve h(z), its capped variants h_e / h_s, the admissible-pair
// predicate, and the variants for secure sensors and for an unknown
// number of compromised sensors.
class TradeoffCurves {
public:
    TradeoffCurves(RateProfile profile, NetworkShape shape);

    const RateProfile& profile() const { return profile_; }
    const NetworkShape& shape() const { return shape_; }

    // h(z) = (m-n) min{ I0(I1^-1(z/(m-n))), I1(I0^-1(z/(m-n))) } on the
    // open interval (0, (m-n) Dmin); involutory and strictly decreasing
    double h(double z) const;
    // the two branches of h, exposed for curve dumps
    double h_branch0(double z) const;  // (m-n) I0(I1^-1(z/(m-n)))
    double h_branch1(double z) const;  // (m-n) I1(I0^-1(z/(m-n)))

    // max efficiency at security target z_s: mC at z_s = 0, min{mC, h(z_s)} else
    double h_e(double z_s) const;
    // max security at efficiency target z_e
    double h_s(double z_e) const;

    bool is_admissible(double z_e, double z_s) const;

    ErrorExponentCaps exponent_caps(double z_e) const;

    // caps when m_s sensors cannot be compromised: sec cap becomes
    // max((m-2n)+, m_s) * C; the trade-off curve itself is unchanged
    ErrorExponentCaps secure_sensor_caps() const;

    // pairwise trade-off when only n_a (resp. n_a') sensors are actually
    // compromised; reduces to h(z) at n_a + n_a' = n
    double h_tilde(int n_a, int n_a_prime, double z) const;

    // optimal value of min sum I1(x_i) over p coordinates subject to
    // sum I0(x_i) < z: p * I1(I0^-1(z/p))
    double constrained_rate_min(int p, double z) const;

    double max_efficiency() const { return shape_.m * profile_.chernoff(); }
    double max_security() const { return shape_.surplus() * profile_.chernoff(); }

private:
    RateProfile profile_;
    NetworkShape shape_;
};

// whether the pair satisfies I0'(0) = -I1'(0), in which case the
// detector tuned for maximal security also attains maximal efficiency
bool is_symmetric_case(const RateProfile& profile, double tol = 1e-8);

}  // namespace secdet

#endif
