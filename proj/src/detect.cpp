#include "secdet/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace secdet {

namespace {

double log_binom_pmf(long long n, long long j, double log_p, double log_q) {
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(j) + 1.0) -
           std::lgamma(double(n - j) + 1.0) + double(j) * log_p + double(n - j) * log_q;
}

// sum of Binom(n, p) pmf over j in [j_lo, j_hi], accumulated in log space
double binom_range_prob(long long n, double p, long long j_lo, long long j_hi) {
    j_lo = std::max<long long>(j_lo, 0);
    j_hi = std::min<long long>(j_hi, n);
    if (j_lo > j_hi) return 0.0;
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    double mx = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (long long j = j_lo; j <= j_hi; ++j) {
        const double lt = log_binom_pmf(n, j, log_p, log_q);
        if (lt <= mx) {
            s += std::exp(lt - mx);
        } else {
            s = s * std::exp(mx - lt) + 1.0;
            mx = lt;
        }
    }
    return std::min(1.0, std::exp(mx + std::log(s)));
}

void validate_z_tuple(const std::vector<double>& z, const NetworkShape& shape,
                      const TradeoffCurves& curves) {
    if (static_cast<int>(z.size()) != shape.n + 1)
        throw ConfigError("unknown_n detector: z_tuple must have n+1 entries (indices 0..n)");
    const double c = curves.profile().chernoff();
    for (int na = 0; na <= shape.n; ++na) {
        if (z[na] < 0.0) throw ConfigError("unknown_n detector: z_tuple entries must be >= 0");
        if (z[na] > std::max(0, shape.m - 2 * na) * c + 1e-9)
            throw ConfigError("unknown_n detector: z_tuple exceeds the (m-2n_a)C cap");
        for (int nb = 0; nb <= shape.n; ++nb) {
            if (z[nb] <= 0.0) continue;
            if (z[na] > curves.h_tilde(na, nb, z[nb]) + 1e-9)
                throw ConfigError("unknown_n detector: z_tuple violates the pairwise trade-off");
        }
    }
}

}  // namespace

Detector::Detector(DetectorSpec spec, NetworkShape shape, const RateProfile& profile)
    : spec_(std::move(spec)), shape_(shape), profile_(&profile) {
    shape_.validate();
    const double c = profile.chernoff();

    if (const auto* s = std::get_if<SecureSpec>(&spec_)) {
        if (s->z_s < 0.0 || s->z_s > shape_.surplus() * c + 1e-9)
            throw ConfigError("secure detector: z_s must lie in [0,(m-2n)+ C]");
    } else if (const auto* ss = std::get_if<SecureSensorsSpec>(&spec_)) {
        if (ss->m_s != shape_.m_s)
            throw ConfigError("secure_sensors detector: m_s disagrees with the network shape");
        if (shape_.n > shape_.m - shape_.m_s)
            throw ConfigError("secure_sensors detector: n exceeds the number of normal sensors");
        const double cap = std::max(shape_.surplus(), shape_.m_s) * c;
        if (ss->z_s < 0.0 || ss->z_s > cap + 1e-9)
            throw ConfigError("secure_sensors detector: z_s must lie in [0, max((m-2n)C, m_s C)]");
    } else if (const auto* u = std::get_if<UnknownNSpec>(&spec_)) {
        validate_z_tuple(u->z_tuple, shape_, TradeoffCurves(profile, shape_));
    } else if (const auto* b = std::get_if<BayesSpec>(&spec_)) {
        for (int i : b->subset)
            if (i < 0 || i >= shape_.m)
                throw ConfigError("bayes detector: subset index out of range");
    } else if (std::get_if<QOutOfMSpec>(&spec_)) {
        if (!profile.pair().binary())
            throw UnsupportedPair("q-out-of-m requires a binary measurement model");
    }

    lam_bar_.assign(shape_.m, 0.0);
}

void Detector::reset() {
    std::fill(lam_bar_.begin(), lam_bar_.end(), 0.0);
    message_total_ = 0.0;
    k_ = 0;
}

double Detector::min_subset_sum(std::vector<double>& v, int count) {
    if (count <= 0) return 0.0;
    if (count < static_cast<int>(v.size()))
        std::nth_element(v.begin(), v.begin() + count, v.end());
    return std::accumulate(v.begin(), v.begin() + count, 0.0);
}

void Detector::fill_rates(int j, std::span<const double> lam, std::vector<double>& out) const {
    out.resize(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) out[i] = profile_->rate_clamped(j, lam[i]);
}

Decision Detector::step(std::span<const double> y_prime) {
    if (static_cast<int>(y_prime.size()) != shape_.m)
        throw ConfigError("detector step: measurement vector size differs from m");
    k_ += 1;

    if (std::holds_alternative<QOutOfMSpec>(spec_)) {
        for (double y : y_prime) {
            if (y != 0.0 && y != 1.0)
                throw OutOfSupport("q-out-of-m: received a non-binary message");
            message_total_ += y;
        }
    } else {
        const double kk = static_cast<double>(k_);
        for (int i = 0; i < shape_.m; ++i)
            lam_bar_[i] = ((kk - 1.0) / kk) * lam_bar_[i] + profile_->pair().llr(y_prime[i]) / kk;
    }
    return decide(lam_bar_);
}

Decision Detector::evaluate(std::span<const double> lam_bar) const {
    if (static_cast<int>(lam_bar.size()) != shape_.m)
        throw ConfigError("detector evaluate: statistic vector size differs from m");
    if (std::holds_alternative<QOutOfMSpec>(spec_))
        throw UnsupportedPair("counting rules have no statistic-vector form");
    return decide(lam_bar);
}

Decision Detector::decide(std::span<const double> lam) const {
    const double lam_sum = std::accumulate(lam.begin(), lam.end(), 0.0);
    // ties on the likelihood sum decide 1
    const auto bayes_sign = [&](double sum) { return Decision{sum < 0.0 ? 0.0 : 1.0}; };

    if (const auto* b = std::get_if<BayesSpec>(&spec_)) {
        double sum = 0.0;
        if (b->subset.empty())
            sum = lam_sum;
        else
            for (int i : b->subset) sum += lam[i];
        return Decision{sum >= b->chi ? 1.0 : 0.0};
    }

    if (const auto* s = std::get_if<SecureSpec>(&spec_)) {
        fill_rates(0, lam, scratch0_);
        const double delta0 = min_subset_sum(scratch0_, shape_.m - shape_.n);
        if (delta0 < s->z_s) return Decision{0.0};
        fill_rates(1, lam, scratch1_);
        const double delta1 = min_subset_sum(scratch1_, shape_.m - shape_.n);
        if (delta1 < s->z_s) return Decision{1.0};
        return bayes_sign(lam_sum);
    }

    if (const auto* ss = std::get_if<SecureSensorsSpec>(&spec_)) {
        const int normal = shape_.m - ss->m_s;
        fill_rates(0, lam.subspan(0, normal), scratch0_);
        double delta0 = min_subset_sum(scratch0_, normal - shape_.n);
        for (int i = normal; i < shape_.m; ++i) delta0 += profile_->rate_clamped(0, lam[i]);
        if (delta0 < ss->z_s) return Decision{0.0};
        fill_rates(1, lam.subspan(0, normal), scratch1_);
        double delta1 = min_subset_sum(scratch1_, normal - shape_.n);
        for (int i = normal; i < shape_.m; ++i) delta1 += profile_->rate_clamped(1, lam[i]);
        if (delta1 < ss->z_s) return Decision{1.0};
        return bayes_sign(lam_sum);
    }

    if (const auto* u = std::get_if<UnknownNSpec>(&spec_)) {
        // sorted once, the minimum over (m-n_a)-subsets is a prefix sum
        fill_rates(0, lam, scratch0_);
        fill_rates(1, lam, scratch1_);
        std::sort(scratch0_.begin(), scratch0_.end());
        std::sort(scratch1_.begin(), scratch1_.end());
        std::partial_sum(scratch0_.begin(), scratch0_.end(), scratch0_.begin());
        std::partial_sum(scratch1_.begin(), scratch1_.end(), scratch1_.begin());
        for (int na = shape_.n; na >= 1; --na) {
            // an empty subset (na >= m) sums to zero and cannot go below
            // the nonnegative demand
            const double d0 = na < shape_.m ? scratch0_[shape_.m - na - 1] : 0.0;
            const double d1 = na < shape_.m ? scratch1_[shape_.m - na - 1] : 0.0;
            if (d0 < u->z_tuple[na]) return Decision{0.0};
            if (d1 < u->z_tuple[na]) return Decision{1.0};
        }
        return bayes_sign(lam_sum);
    }

    if (std::holds_alternative<TrimmedSpec>(spec_)) {
        if (2 * shape_.n >= shape_.m) return Decision{1.0};  // nothing survives the trim
        scratch0_.assign(lam.begin(), lam.end());
        std::sort(scratch0_.begin(), scratch0_.end());
        const double trimmed = std::accumulate(scratch0_.begin() + shape_.n,
                                               scratch0_.end() - shape_.n, 0.0);
        return bayes_sign(trimmed);
    }

    const auto& q = std::get<QOutOfMSpec>(spec_);
    if (k_ > static_cast<int>(q.q_schedule.size()))
        throw ConfigError("q-out-of-m: q_schedule is shorter than the horizon");
    return Decision{message_total_ >= static_cast<double>(q.q_schedule[k_ - 1]) ? 1.0 : 0.0};
}

ErrorPair qom_exact_error(const RateProfile& profile, const NetworkShape& shape, long long q_k,
                         int k) {
    if (!profile.pair().binary())
        throw UnsupportedPair("qom_exact_error requires a binary measurement model");
    if (k < 1) throw RangeError("qom_exact_error: k must be positive");
    const long long benign = static_cast<long long>(shape.m - shape.n) * k;
    const long long attacked = static_cast<long long>(shape.n) * k;
    ErrorPair e;
    e.p_miss = binom_range_prob(benign, profile.pair().p1(), 0, q_k);
    e.p_fa = binom_range_prob(benign, profile.pair().p0(), q_k - attacked, benign);
    return e;
}

ErrorPair qom_benign_error(const RateProfile& profile, const NetworkShape& shape, long long q_k,
                          int k) {
    if (!profile.pair().binary())
        throw UnsupportedPair("qom_benign_error requires a binary measurement model");
    if (k < 1) throw RangeError("qom_benign_error: k must be positive");
    const long long total = static_cast<long long>(shape.m) * k;
    ErrorPair e;
    e.p_miss = binom_range_prob(total, profile.pair().p1(), 0, q_k - 1);
    e.p_fa = binom_range_prob(total, profile.pair().p0(), q_k, total);
    return e;
}

ErrorPair trim_exact_error(const RateProfile& profile, const NetworkShape& shape, int k) {
    if (!profile.pair().binary())
        throw UnsupportedPair("trim_exact_error requires a binary measurement model");
    if (k < 1) throw RangeError("trim_exact_error: k must be positive");
    const int m = shape.m, n = shape.n;
    const int win = m - 2 * n;
    if (win <= 0) return {0.0, 1.0};  // empty trimmed sum ties to decision 1

    const auto& pair = profile.pair();
    // count the symbol with the larger llr so the statistic increases
    // with the count; the two llr values always have opposite signs
    double s0 = pair.llr(0.0), s1 = pair.llr(1.0);
    const bool count_ones = s1 > s0;
    if (!count_ones) std::swap(s0, s1);
    const double delta = s1 - s0;
    // decision 1 iff the middle-window count sum reaches t_min
    const long long t_min =
        static_cast<long long>(std::ceil(-double(win) * k * s0 / delta - 1e-9));

    std::vector<std::vector<double>> choose(m + 1, std::vector<double>(m + 1, 0.0));
    for (int a = 0; a <= m; ++a) {
        choose[a][0] = 1.0;
        for (int b = 1; b <= a; ++b)
            choose[a][b] = choose[a - 1][b - 1] + (b <= a - 1 ? choose[a - 1][b] : 0.0);
    }

    ErrorPair out;
    for (int theta = 0; theta < 2; ++theta) {
        const double p_one = theta == 0 ? pair.p0() : pair.p1();
        const double p = count_ones ? p_one : 1.0 - p_one;
        std::vector<double> pmf(k + 1);
        for (int c = 0; c <= k; ++c)
            pmf[c] = std::exp(std::lgamma(k + 1.0) - std::lgamma(c + 1.0) -
                              std::lgamma(k - c + 1.0) + c * std::log(p) +
                              (k - c) * std::log1p(-p));

        // dp[s][t]: probability that the s smallest counts are placed and
        // the window positions covered so far sum to t
        const long long t_cap = static_cast<long long>(win) * k;
        std::vector<std::vector<double>> dp(m + 1, std::vector<double>(t_cap + 1, 0.0));
        dp[0][0] = 1.0;
        for (int c = 0; c <= k; ++c) {
            std::vector<std::vector<double>> next(m + 1, std::vector<double>(t_cap + 1, 0.0));
            for (int s = 0; s <= m; ++s) {
                for (long long t = 0; t <= t_cap; ++t) {
                    const double w = dp[s][t];
                    if (w == 0.0) continue;
                    double pr = 1.0;  // pmf[c]^r accumulated
                    for (int r = 0; s + r <= m; ++r, pr *= pmf[c]) {
                        const int overlap =
                            std::max(0, std::min(s + r, m - n) - std::max(s, n));
                        next[s + r][t + static_cast<long long>(overlap) * c] +=
                            w * choose[m - s][r] * pr;
                    }
                }
            }
            dp.swap(next);
        }
        // accumulate the error tail directly; its complement can be 1 to
        // within rounding and would cancel away tiny probabilities
        double tail = 0.0;
        if (theta == 0) {
            for (long long t = std::max<long long>(t_min, 0); t <= t_cap; ++t)
                tail += dp[m][t];
            out.p_fa = std::min(1.0, tail);
        } else {
            for (long long t = 0; t < std::min(t_min, t_cap + 1); ++t) tail += dp[m][t];
            out.p_miss = std::min(1.0, tail);
        }
    }
    return out;
}

QomOptimum qom_optimize(const RateProfile& profile, const NetworkShape& shape, int k) {
    const long long lo = static_cast<long long>(shape.n) * k + 1;
    long long hi = static_cast<long long>(shape.m - shape.n) * k;
    if (hi < lo) hi = lo;  // no usable threshold; any choice has worst error 1
    QomOptimum best;
    best.q_star = lo;
    best.worst_error = std::numeric_limits<double>::infinity();
    for (long long q = lo; q <= hi; ++q) {
        const double worst = qom_exact_error(profile, shape, q, k).worst();
        if (worst < best.worst_error) {
            best.worst_error = worst;
            best.q_star = q;
        }
    }
    return best;
}

}  // namespace secdet
