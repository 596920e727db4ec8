#ifndef SECDET_DETECT_HPP
#define SECDET_DETECT_HPP

#include <span>
#include <variant>
#include <vector>

#include "secdet/limits.hpp"

namespace secdet {

// Detector output. Shipped detectors always emit exactly 0 or 1; the
// fractional range is kept for randomized rules.
struct Decision {
    double value = 0.0;
    bool says_one() const { return value >= 0.5; }
};

// sum of per-sensor mean log-likelihood ratios over `subset` (all
// sensors when empty) thresholded at chi
struct BayesSpec {
    double chi = 0.0;
    std::vector<int> subset;  // 0-based indices; empty = all
};

// threshold-on-rate-sums rule achieving any admissible (z_e, z_s)
struct SecureSpec {
    double z_s = 0.0;
};

// secure-sensor variant: the last m_s sensors cannot be compromised and
// always contribute their full rate values
struct SecureSensorsSpec {
    double z_s = 0.0;
    int m_s = 0;
};

// unknown-number-of-compromised variant: z_tuple[i] is the exponent
// demanded when i sensors are actually compromised, i = 0..n
struct UnknownNSpec {
    std::vector<double> z_tuple;
};

// drop the n largest and n smallest statistics, sign-test the rest
struct TrimmedSpec {};

// counting rule for binary measurements: decide 1 when the running
// message total reaches q_schedule[k-1]
struct QOutOfMSpec {
    std::vector<long long> q_schedule;
};

using DetectorSpec =
    std::variant<BayesSpec, SecureSpec, SecureSensorsSpec, UnknownNSpec, TrimmedSpec, QOutOfMSpec>;

// Sequential detector: feed one m-vector of (possibly corrupted)
// measurements per time step, get a decision for that step.  Owns the
// running per-sensor statistics; one instance per simulation trial.
class Detector {
public:
    Detector(DetectorSpec spec, NetworkShape shape, const RateProfile& profile);

    Decision step(std::span<const double> y_prime);
    void reset();

    // the decision rule evaluated at an arbitrary statistic vector,
    // without touching the running state; counting rules have no
    // statistic-vector form and throw UnsupportedPair
    Decision evaluate(std::span<const double> lam_bar) const;

    int time() const { return k_; }
    std::span<const double> lam_bar() const { return lam_bar_; }

private:
    Decision decide(std::span<const double> lam) const;
    // sum of the `count` smallest values of v (selection, not subset
    // enumeration; the subsets minimum equals picking the smallest terms)
    static double min_subset_sum(std::vector<double>& v, int count);
    void fill_rates(int j, std::span<const double> lam, std::vector<double>& out) const;

    DetectorSpec spec_;
    NetworkShape shape_;
    const RateProfile* profile_;
    std::vector<double> lam_bar_;
    double message_total_ = 0.0;  // q-out-of-m running sum
    int k_ = 0;
    mutable std::vector<double> scratch0_, scratch1_;
};

struct ErrorPair {
    double p_miss = 0.0;  // theta = 1 decided as 0
    double p_fa = 0.0;    // theta = 0 decided as 1
    double worst() const { return p_miss > p_fa ? p_miss : p_fa; }
};

// Exact worst-case error probabilities of the counting rule at time k
// with threshold q_k: the attacker sends constant 0 (1) when theta is
// 1 (0), so both error probabilities are binomial tails over the
// (m-n)k benign messages.  Binary pairs only.
ErrorPair qom_exact_error(const RateProfile& profile, const NetworkShape& shape, long long q_k,
                          int k);

// same binomial tails without an attacker: all mk messages are genuine
ErrorPair qom_benign_error(const RateProfile& profile, const NetworkShape& shape, long long q_k,
                           int k);

// Exact no-attacker error probabilities of the trimmed-mean detector at
// time k for binary pairs.  Each sensor's statistic is a monotone
// function of its hit count, so the trimmed sign test reduces to an
// integer threshold on the middle order-statistic counts, evaluated
// exactly by dynamic programming over sorted count multisets.
ErrorPair trim_exact_error(const RateProfile& profile, const NetworkShape& shape, int k);

// brute-force search for the threshold minimizing the worst-case error
// at time k; ties break toward smaller q
struct QomOptimum {
    long long q_star = 0;
    double worst_error = 1.0;
};
QomOptimum qom_optimize(const RateProfile& profile, const NetworkShape& shape, int k);

}  // namespace secdet

#endif
