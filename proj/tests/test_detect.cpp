#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "secdet/detect.hpp"

using namespace secdet;

namespace {

void all_subsets_of_size(int m, int size, std::vector<std::vector<int>>& out) {
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        out.push_back(idx);
        int i = size - 1;
        while (i >= 0 && idx[i] == m - size + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// exhaustive min over (m-n)-subsets of summed rate values
double exhaustive_delta(const RateProfile& prof, int j, const std::vector<double>& lam, int n) {
    const int m = static_cast<int>(lam.size());
    std::vector<std::vector<int>> subsets;
    all_subsets_of_size(m, m - n, subsets);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& subset : subsets) {
        double s = 0.0;
        for (int i : subset) s += prof.rate_clamped(j, lam[i]);
        best = std::min(best, s);
    }
    return best;
}

bool in_extended_ball(const RateProfile& prof, int j, const std::vector<double>& lam, double z,
                      int n) {
    return exhaustive_delta(prof, j, lam, n) < z;
}

// drives a detector to an arbitrary statistic vector in one step
// (continuous pairs only)
Decision decision_at(const DistributionPair& pair, DetectorSpec spec, NetworkShape shape,
                     const RateProfile& prof, const std::vector<double>& lam) {
    Detector det(std::move(spec), shape, prof);
    std::vector<double> y(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) y[i] = pair.llr_inv(lam[i]);
    return det.step(y);
}

}  // namespace

TEST_SUITE("detect") {

TEST_CASE("statistic recursion equals the batch mean") {
    const auto pair = DistributionPair::gaussian_shift(1.0, 0.0, 1.0);
    const RateProfile prof(pair);
    const NetworkShape shape{5, 1, 0};
    Detector det(BayesSpec{}, shape, prof);

    RngStream rng(31);
    std::vector<std::vector<double>> llr_history(shape.m);
    std::vector<double> y(shape.m);
    for (int k = 1; k <= 25; ++k) {
        for (int i = 0; i < shape.m; ++i) {
            y[i] = pair.sample(k % 2, rng);
            llr_history[i].push_back(pair.llr(y[i]));
        }
        det.step(y);
        for (int i = 0; i < shape.m; ++i) {
            const double batch =
                std::accumulate(llr_history[i].begin(), llr_history[i].end(), 0.0) / k;
            CHECK(det.lam_bar()[i] == doctest::Approx(batch).epsilon(1e-10));
        }
    }
    det.reset();
    CHECK(det.time() == 0);
    for (double v : det.lam_bar()) CHECK(v == 0.0);
}

TEST_CASE("secure detector with z_s = 0 reduces to the Bayes rule") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    Detector secure(SecureSpec{0.0}, shape, prof);
    Detector bayes(BayesSpec{}, shape, prof);

    RngStream rng(71);
    std::vector<double> y(shape.m);
    for (int k = 1; k <= 200; ++k) {
        for (auto& v : y) v = rng.uniform() < 0.35 ? 1.0 : 0.0;
        CHECK(secure.step(y).value == bayes.step(y).value);
    }
}

TEST_CASE("ties on the likelihood sum decide 1") {
    const auto pair = DistributionPair::gaussian_shift(1.0, 0.0, 1.0);
    const RateProfile prof(pair);
    const NetworkShape shape{3, 0, 0};
    Detector det(BayesSpec{}, shape, prof);
    const std::vector<double> y = {pair.llr_inv(0.3), pair.llr_inv(-0.2), pair.llr_inv(-0.1)};
    CHECK(det.step(y).value == 1.0);
}

TEST_CASE("trimmed detector follows the sign of the middle statistics") {
    const auto pair = DistributionPair::gaussian_shift(1.0, 0.0, 1.0);
    const RateProfile prof(pair);
    const NetworkShape shape{5, 1, 0};
    // sorted statistics -3, -1, -0.5, 2, 9: middle three sum to 0.5 >= 0
    auto d = decision_at(pair, TrimmedSpec{}, shape, prof, {9.0, -1.0, 2.0, -3.0, -0.5});
    CHECK(d.value == 1.0);
    // middle three sum to -1.5 < 0
    d = decision_at(pair, TrimmedSpec{}, shape, prof, {9.0, -1.0, -0.3, -3.0, -0.2});
    CHECK(d.value == 0.0);
}

TEST_CASE("selection rule equals exhaustive subset search") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    RngStream rng(13);
    for (int m : {4, 6, 9, 10}) {
        for (int n : {1, 2, 3}) {
            if (m <= 2 * n) continue;
            // random statistic vectors in the essential range
            for (int rep = 0; rep < 50; ++rep) {
                std::vector<double> lam(m), rates(m);
                for (auto& v : lam)
                    v = prof.lambda_min() +
                        (prof.lambda_max() - prof.lambda_min()) * rng.uniform();
                for (int j = 0; j < 2; ++j) {
                    for (int i = 0; i < m; ++i) rates[i] = prof.rate_clamped(j, lam[i]);
                    std::vector<double> copy = rates;
                    std::nth_element(copy.begin(), copy.begin() + (m - n), copy.end());
                    const double selected =
                        std::accumulate(copy.begin(), copy.begin() + (m - n), 0.0);
                    CHECK(selected ==
                          doctest::Approx(exhaustive_delta(prof, j, lam, n)).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("secure decisions equal extended-ball region membership") {
    const auto pair = DistributionPair::gaussian_shift(1.0, 0.0, 1.0);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    const double z_s = 0.625;  // (m-2n) C for this pair

    RngStream rng(99);
    int zeros = 0, ones = 0, thresholds = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        std::vector<double> lam(shape.m);
        // mixed scales so all three decision branches get exercised
        const double scale = rep % 3 == 0 ? 0.15 : (rep % 3 == 1 ? 0.6 : 1.5);
        for (auto& v : lam) v = scale * (2.0 * rng.uniform() - 1.0);

        const double lam_sum = std::accumulate(lam.begin(), lam.end(), 0.0);
        const bool in_e0 = in_extended_ball(prof, 0, lam, z_s, shape.n);
        const bool in_e1 = in_extended_ball(prof, 1, lam, z_s, shape.n);
        const bool region_zero = in_e0 || (lam_sum < 0.0 && !in_e1);
        if (in_e0 || in_e1) ++thresholds;

        const auto d = decision_at(pair, SecureSpec{z_s}, shape, prof, lam);
        CHECK(d.value == (region_zero ? 0.0 : 1.0));
        (region_zero ? zeros : ones) += 1;
    }
    // the sample actually covered both decisions and the threshold branches
    CHECK(zeros > 100);
    CHECK(ones > 100);
    CHECK(thresholds > 100);
}

TEST_CASE("extended balls of an admissible pair are disjoint") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    const double c = prof.chernoff();
    const double z_s = 4.0 * c;  // inside the security cap (m-2n)C
    const double z_e = 9.0 * c;  // maximal admissible efficiency

    RngStream rng(2024);
    int near_boundary = 0;
    for (int rep = 0; rep < 20000; ++rep) {
        std::vector<double> lam(shape.m);
        for (auto& v : lam)
            v = prof.lambda_min() + (prof.lambda_max() - prof.lambda_min()) * rng.uniform();
        const bool e0 = in_extended_ball(prof, 0, lam, z_s, shape.n);
        const bool e1 = in_extended_ball(prof, 1, lam, z_s, shape.n);
        CHECK_FALSE((e0 && e1));
        // Bal(M, 0, z_e): full-index rate-0 sum below z_e
        double full0 = 0.0;
        for (double v : lam) full0 += prof.rate_clamped(0, v);
        CHECK_FALSE((e1 && full0 < z_e));
        if (e0 || e1) ++near_boundary;
    }
    CHECK(near_boundary > 500);
}

TEST_CASE("secure-sensors detector with m_s = 0 matches the secure detector") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{7, 2, 0};
    Detector a(SecureSpec{0.9}, shape, prof);
    Detector b(SecureSensorsSpec{0.9, 0}, shape, prof);
    RngStream rng(5);
    std::vector<double> y(shape.m);
    for (int k = 1; k <= 300; ++k) {
        for (auto& v : y) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
        CHECK(a.step(y).value == b.step(y).value);
    }
}

TEST_CASE("secure-sensors detector weighs hardened sensors separately") {
    const auto pair = DistributionPair::gaussian_shift(1.0, 0.0, 1.0);
    const RateProfile prof(pair);
    const double c = prof.chernoff();
    const NetworkShape shape{5, 2, 2};
    const double z_s = std::max(shape.surplus(), shape.m_s) * c;
    // normal sensors wildly split, hardened sensors strongly negative:
    // the rate sums over normal sensors alone would miss the hardened
    // evidence
    const auto d = decision_at(pair, SecureSensorsSpec{z_s, 2}, shape, prof,
                               {-0.5, -0.5, 2.0, -0.52, -0.51});
    CHECK(d.value == 0.0);
}

TEST_CASE("unknown-n detector validates its tuple and falls through to Bayes") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    const double c = prof.chernoff();

    CHECK_THROWS_AS(Detector(UnknownNSpec{{0.1, 0.2}}, shape, prof), ConfigError);
    CHECK_THROWS_AS(Detector(UnknownNSpec{{9.1 * c, 7.1 * c, 5.1 * c}}, shape, prof),
                    ConfigError);
    CHECK_THROWS_AS(Detector(UnknownNSpec{{-0.1, 0.0, 0.0}}, shape, prof), ConfigError);

    // all-zero demands never fire the loop, leaving the Bayes rule
    Detector u(UnknownNSpec{{0.0, 0.0, 0.0}}, shape, prof);
    Detector bayes(BayesSpec{}, shape, prof);
    RngStream rng(8);
    std::vector<double> y(shape.m);
    for (int k = 1; k <= 200; ++k) {
        for (auto& v : y) v = rng.uniform() < 0.4 ? 1.0 : 0.0;
        CHECK(u.step(y).value == bayes.step(y).value);
    }

    // a working tuple: admissible demands fire the per-n_a thresholds
    const std::vector<double> tuple = {0.0, 0.6 * 7.0 * c, 0.6 * 5.0 * c};
    CHECK_NOTHROW(Detector(UnknownNSpec{tuple}, shape, prof));
}

TEST_CASE("bayes subset variant sums only its subset") {
    const auto pair = DistributionPair::gaussian_shift(1.0, 0.0, 1.0);
    const RateProfile prof(pair);
    const NetworkShape shape{4, 0, 0};
    BayesSpec spec;
    spec.subset = {0, 2};
    // lam = (1, -5, 0.5, -5): subset sum 1.5 >= 0 decides 1
    const auto d = decision_at(pair, spec, shape, prof, {1.0, -5.0, 0.5, -5.0});
    CHECK(d.value == 1.0);
    CHECK_THROWS_AS(Detector(BayesSpec{0.0, {7}}, shape, prof), ConfigError);
}

TEST_CASE("q-out-of-m detector counts messages against the schedule") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{3, 1, 0};
    Detector det(QOutOfMSpec{{2, 3, 5}}, shape, prof);
    CHECK(det.step(std::vector<double>{1, 0, 1}).value == 1.0);   // total 2 >= 2
    CHECK(det.step(std::vector<double>{0, 0, 0}).value == 0.0);   // total 2 < 3
    CHECK(det.step(std::vector<double>{1, 1, 1}).value == 1.0);   // total 5 >= 5
    CHECK_THROWS_AS(det.step(std::vector<double>{1, 0, 0}), ConfigError);  // schedule over

    const auto gauss = DistributionPair::gaussian_shift(1.0, 0.0, 1.0);
    const RateProfile gprof(gauss);
    CHECK_THROWS_AS(Detector(QOutOfMSpec{{2}}, shape, gprof), UnsupportedPair);
}

TEST_CASE("degenerate shapes with nothing left after trimming") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    // m <= 2n: the trimmed sum is empty and ties decide 1
    Detector trim(TrimmedSpec{}, NetworkShape{4, 2, 0}, prof);
    CHECK(trim.step(std::vector<double>{0, 0, 0, 0}).value == 1.0);
    CHECK(trim.step(std::vector<double>{1, 1, 1, 1}).value == 1.0);
}

TEST_CASE("secure detector rejects z_s outside the admissible range") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    CHECK_THROWS_AS(Detector(SecureSpec{-0.1}, NetworkShape{9, 2, 0}, prof), ConfigError);
    CHECK_THROWS_AS(Detector(SecureSpec{10.0}, NetworkShape{9, 2, 0}, prof), ConfigError);
    CHECK_THROWS_AS(Detector(SecureSpec{0.1}, NetworkShape{4, 2, 0}, prof), ConfigError);
    CHECK_NOTHROW(Detector(SecureSpec{0.0}, NetworkShape{4, 2, 0}, prof));
}

TEST_CASE("exact counting-rule errors: degenerate thresholds and closed forms") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};

    for (int k : {1, 3, 7}) {
        const long long nk = 2LL * k, mk = 9LL * k;
        CHECK(qom_exact_error(prof, shape, nk, k).worst() >= 1.0 - 1e-12);
        CHECK(qom_exact_error(prof, shape, nk - 1, k).worst() >= 1.0 - 1e-12);
        CHECK(qom_exact_error(prof, shape, mk - nk, k).worst() >= 1.0 - 1e-12);
        CHECK(qom_exact_error(prof, shape, mk - nk + 3, k).worst() >= 1.0 - 1e-12);
    }

    // spot value against a directly computed binomial sum at k=1, q=4
    const auto e = qom_exact_error(prof, shape, 4, 1);
    auto binom_cdf = [](int n, double p, int hi) {
        double s = 0.0;
        for (int j = 0; j <= hi; ++j) {
            double term = std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                                   std::lgamma(n - j + 1.0));
            s += term * std::pow(p, j) * std::pow(1 - p, n - j);
        }
        return s;
    };
    CHECK(e.p_miss == doctest::Approx(binom_cdf(7, 0.6, 4)).epsilon(1e-12));
    CHECK(e.p_fa == doctest::Approx(1.0 - binom_cdf(7, 0.02, 1)).epsilon(1e-10));

    CHECK_THROWS_AS(
        qom_exact_error(RateProfile(DistributionPair::gaussian_shift(1, 0, 1)), shape, 4, 1),
        UnsupportedPair);
}

TEST_CASE("near-identical hypotheses leave no usable threshold") {
    const auto pair = DistributionPair::bernoulli(0.5, 0.500001);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    for (long long q : {3, 4, 5, 6}) {
        const auto e = qom_exact_error(prof, shape, q, 1);
        CHECK(e.p_miss + e.p_fa >= 1.0 - 1e-6);
    }
}

TEST_CASE("exact trimmed-detector errors match stream enumeration") {
    const auto check_against_enumeration = [](double p0, double p1, int m, int n, int k) {
        const auto pair = DistributionPair::bernoulli(p0, p1);
        const RateProfile prof(pair);
        const NetworkShape shape{m, n, 0};
        const auto exact = trim_exact_error(prof, shape, k);

        double fa = 0.0, miss = 0.0;
        const int cells = m * k;
        for (long long code = 0; code < (1LL << cells); ++code) {
            Detector det(TrimmedSpec{}, shape, prof);
            Decision d{};
            double prob0 = 1.0, prob1 = 1.0;
            int bit = 0;
            std::vector<double> y(m);
            for (int t = 1; t <= k; ++t) {
                for (int i = 0; i < m; ++i, ++bit) {
                    y[i] = (code >> bit) & 1 ? 1.0 : 0.0;
                    prob0 *= y[i] == 1.0 ? p0 : 1.0 - p0;
                    prob1 *= y[i] == 1.0 ? p1 : 1.0 - p1;
                }
                d = det.step(y);
            }
            fa += prob0 * d.value;
            miss += prob1 * (1.0 - d.value);
        }
        CHECK(exact.p_fa == doctest::Approx(fa).epsilon(1e-10));
        CHECK(exact.p_miss == doctest::Approx(miss).epsilon(1e-10));
    };
    check_against_enumeration(0.02, 0.6, 9, 2, 1);
    check_against_enumeration(0.3, 0.7, 5, 1, 2);
    check_against_enumeration(0.7, 0.25, 5, 1, 2);  // inverted llr order
    check_against_enumeration(0.1, 0.45, 3, 1, 4);
}

TEST_CASE("exact trimmed-detector errors match Monte Carlo at depth") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    const auto exact = trim_exact_error(prof, shape, 3);

    RngStream rng(404);
    const int trials = 200000;
    int miss = 0;
    for (int t = 0; t < trials; ++t) {
        Detector det(TrimmedSpec{}, shape, prof);
        Decision d{};
        std::vector<double> y(shape.m);
        for (int k = 1; k <= 3; ++k) {
            for (auto& v : y) v = pair.sample(1, rng);
            d = det.step(y);
        }
        miss += d.value == 0.0 ? 1 : 0;
    }
    const double p_hat = double(miss) / trials;
    const double se = std::sqrt(exact.p_miss * (1 - exact.p_miss) / trials);
    CHECK(std::fabs(p_hat - exact.p_miss) <= 3.0 * se);

    // degenerate window: everything is trimmed, ties decide 1
    const auto degenerate = trim_exact_error(prof, NetworkShape{4, 2, 0}, 2);
    CHECK(degenerate.p_fa == 1.0);
    CHECK(degenerate.p_miss == 0.0);

    CHECK_THROWS_AS(
        trim_exact_error(RateProfile(DistributionPair::gaussian_shift(1, 0, 1)), shape, 1),
        UnsupportedPair);
}

TEST_CASE("threshold optimization") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);

    // m=3, n=1, k=1: the only threshold beyond nk is q=2
    const auto forced = qom_optimize(prof, NetworkShape{3, 1, 0}, 1);
    CHECK(forced.q_star == 2);

    // symmetric flip pair: the optimum sits near the midpoint mk/2
    const auto sym = RateProfile(DistributionPair::bernoulli(0.2, 0.8));
    for (int k : {2, 5, 10}) {
        const auto opt = qom_optimize(sym, NetworkShape{9, 2, 0}, k);
        CHECK(std::llabs(opt.q_star - 9LL * k / 2) <= 1);
        // exhaustive re-check of optimality
        for (long long q = 2LL * k + 1; q <= 7LL * k; ++q)
            CHECK(opt.worst_error <= qom_exact_error(sym, NetworkShape{9, 2, 0}, q, k).worst() +
                                         1e-15);
    }
}

}  // TEST_SUITE
