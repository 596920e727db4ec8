#include <doctest.h>

#include <cmath>
#include <vector>

#include "secdet/sim.hpp"

using namespace secdet;

namespace {

// exact per-k error probabilities for tiny Bernoulli cases by summing
// over every possible measurement stream; the full-stream probability
// marginalizes each prefix correctly
std::vector<double> enumerate_exact_errors(const DistributionPair& pair, int theta, int m,
                                           int horizon, const DetectorSpec& spec) {
    const RateProfile prof(pair);
    const NetworkShape shape{m, 0, 0};
    const int cells = m * horizon;
    const double p = theta == 0 ? pair.p0() : pair.p1();
    std::vector<double> err(horizon, 0.0);
    std::vector<double> per_k_err(horizon);
    for (long long code = 0; code < (1LL << cells); ++code) {
        double prob = 1.0;
        Detector det(spec, shape, prof);
        std::vector<double> y(m);
        int bit = 0;
        for (int k = 1; k <= horizon; ++k) {
            for (int i = 0; i < m; ++i, ++bit) {
                y[i] = (code >> bit) & 1 ? 1.0 : 0.0;
                prob *= y[i] == 1.0 ? p : 1.0 - p;
            }
            const auto d = det.step(y);
            per_k_err[k - 1] = theta == 0 ? d.value : 1.0 - d.value;
        }
        for (int k = 0; k < horizon; ++k) err[k] += prob * per_k_err[k];
    }
    return err;
}

ScenarioConfig tiny_config() {
    ScenarioConfig cfg(DistributionPair::bernoulli(0.3, 0.7));
    cfg.shape = NetworkShape{1, 0, 0};
    cfg.detector = BayesSpec{};
    cfg.attack = {AttackSpec::Kind::None, 0.0};
    cfg.horizon = 3;
    cfg.trials = 200000;
    cfg.master_seed = 4242;
    return cfg;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("fit_exponent on synthetic curves") {
    std::vector<PerKError> curve;
    for (int k = 1; k <= 20; ++k) {
        PerKError row;
        row.k = k;
        row.worst = std::exp(-0.5 * k);
        curve.push_back(row);
    }
    CHECK(fit_exponent(curve, {1, 20}) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fit_exponent(curve, {10, 20}) == doctest::Approx(0.5).epsilon(1e-9));

    for (auto& row : curve) row.worst = 0.5;
    CHECK(fit_exponent(curve, {1, 20}) == doctest::Approx(0.0).epsilon(1e-9));

    for (auto& row : curve) row.worst = 0.0;
    CHECK_THROWS_AS(fit_exponent(curve, {1, 20}), InsufficientData);
    std::vector<PerKError> three(curve.begin(), curve.begin() + 3);
    for (auto& row : three) row.worst = 0.1;
    CHECK_THROWS_AS(fit_exponent(three, {1, 20}), InsufficientData);
}

TEST_CASE("log-corrected fit absorbs polynomial prefactors") {
    // growing k^3 prefactor, the shape that biases plain slopes low
    std::vector<PerKError> curve;
    for (int k = 1; k <= 24; ++k) {
        PerKError row;
        row.k = k;
        row.worst = 1e-4 * std::exp(-0.5 * k) * std::pow(double(k), 3.0);
        curve.push_back(row);
    }
    CHECK(fit_exponent_log_corrected(curve, {2, 24}) == doctest::Approx(0.5).epsilon(1e-9));
    // the plain slope reads the same curve low
    CHECK(fit_exponent(curve, {2, 24}) < 0.45);
    // pure exponential: both agree
    for (auto& row : curve) row.worst = std::exp(-0.7 * row.k);
    CHECK(fit_exponent_log_corrected(curve, {1, 24}) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK_THROWS_AS(fit_exponent_log_corrected(curve, {1, 4}), InsufficientData);
}

TEST_CASE("identical configs reproduce bit-identical estimates across thread counts") {
    auto cfg = tiny_config();
    cfg.horizon = 8;  // enough points for the exponent fit
    cfg.trials = 20000;
    cfg.threads = 1;
    const auto a = run_scenario(cfg);
    cfg.threads = 2;
    const auto b = run_scenario(cfg);
    cfg.threads = 4;
    const auto c = run_scenario(cfg);
    REQUIRE(a.per_k.size() == b.per_k.size());
    for (std::size_t i = 0; i < a.per_k.size(); ++i) {
        CHECK(a.per_k[i].p_err0 == b.per_k[i].p_err0);
        CHECK(a.per_k[i].p_err1 == b.per_k[i].p_err1);
        CHECK(a.per_k[i].se0 == b.per_k[i].se0);
        CHECK(a.per_k[i].p_err0 == c.per_k[i].p_err0);
    }
    CHECK(a.fitted_exponent == b.fitted_exponent);

    // different seed, different numbers
    cfg.master_seed += 1;
    const auto d = run_scenario(cfg);
    CHECK(a.per_k[0].p_err0 != d.per_k[0].p_err0);
}

TEST_CASE("plain Monte Carlo matches exhaustive stream enumeration") {
    const auto cfg = tiny_config();
    const auto est = run_scenario(cfg);
    const auto exact0 = enumerate_exact_errors(cfg.pair, 0, 1, 3, cfg.detector);
    const auto exact1 = enumerate_exact_errors(cfg.pair, 1, 1, 3, cfg.detector);
    for (int k = 1; k <= 3; ++k) {
        const auto& row = est.per_k[k - 1];
        CHECK(std::fabs(row.p_err0 - exact0[k - 1]) <= 3.0 * row.se0);
        CHECK(std::fabs(row.p_err1 - exact1[k - 1]) <= 3.0 * row.se1);
        CHECK(row.se0 > 0.0);
    }
}

TEST_CASE("tilted estimator agrees with plain sampling (unbiasedness)") {
    ScenarioConfig cfg(DistributionPair::bernoulli(0.3, 0.7));
    cfg.shape = NetworkShape{1, 0, 0};
    cfg.detector = BayesSpec{};
    cfg.horizon = 2;
    cfg.trials = 150000;
    cfg.master_seed = 99;
    const auto plain = run_scenario(cfg);

    cfg.sampler.kind = SamplerSpec::Kind::Tilted;
    cfg.master_seed = 100;
    const auto tilted = run_scenario(cfg);

    for (int k = 0; k < 2; ++k) {
        const auto& p = plain.per_k[k];
        const auto& t = tilted.per_k[k];
        const double combined0 = std::sqrt(p.se0 * p.se0 + t.se0 * t.se0);
        const double combined1 = std::sqrt(p.se1 * p.se1 + t.se1 * t.se1);
        CHECK(std::fabs(p.p_err0 - t.p_err0) <= 3.0 * combined0);
        CHECK(std::fabs(p.p_err1 - t.p_err1) <= 3.0 * combined1);
    }
}

TEST_CASE("tilted sampling reaches deep error tails plain sampling cannot") {
    ScenarioConfig cfg(DistributionPair::bernoulli(0.02, 0.6));
    cfg.shape = NetworkShape{9, 2, 0};
    cfg.detector = BayesSpec{};
    cfg.horizon = 40;
    cfg.trials = 20000;
    cfg.master_seed = 7;
    cfg.sampler.kind = SamplerSpec::Kind::Tilted;
    const auto est = run_scenario(cfg);

    const auto& last = est.per_k.back();
    REQUIRE(last.worst > 0.0);
    REQUIRE(last.worst < 1e-20);  // far beyond plain-MC reach
    // relative error of the tilted estimate vs the hypothetical plain-MC
    // relative error sqrt((1-p)/(N p)) at the same trial count
    const double p = last.worst;
    const double tilted_rse = std::max(last.se0 / std::max(last.p_err0, 1e-300),
                                       last.se1 / std::max(last.p_err1, 1e-300));
    const double plain_rse = std::sqrt((1.0 - p) / (cfg.trials * p));
    CHECK(tilted_rse * 10.0 <= plain_rse);
}

TEST_CASE("long-horizon tilted weights stay finite in log space") {
    ScenarioConfig cfg(DistributionPair::bernoulli(0.02, 0.6));
    cfg.shape = NetworkShape{9, 2, 0};
    cfg.detector = BayesSpec{};
    cfg.horizon = 200;
    cfg.trials = 500;
    cfg.master_seed = 18;
    cfg.sampler.kind = SamplerSpec::Kind::Tilted;
    const auto est = run_scenario(cfg);
    for (const auto& row : est.per_k) {
        CHECK(std::isfinite(row.p_err0));
        CHECK(std::isfinite(row.se0));
        CHECK(row.p_err0 >= 0.0);
        CHECK(row.p_err0 <= 1.0 + 1e-9);
    }
}

TEST_CASE("unknown-n detector against a partial compromise") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    const double c = prof.chernoff();
    const std::vector<double> tuple = {0.0, 0.5 * 7.0 * c, 0.5 * 5.0 * c};

    ScenarioConfig cfg(pair);
    cfg.shape = shape;
    cfg.detector = UnknownNSpec{tuple};
    cfg.attack = {AttackSpec::Kind::RateTarget, tuple[1], 1};  // one sensor compromised
    cfg.horizon = 10;
    cfg.trials = 30000;
    cfg.master_seed = 23;
    cfg.fit_window = std::make_pair(1, 6);
    const auto est = run_scenario(cfg);
    // errors vanish at a healthy rate with only one attacked sensor
    CHECK(est.per_k.front().worst > est.per_k[5].worst);
    CHECK(est.fitted_exponent > 0.5);
}

TEST_CASE("exact attacked error curves match Monte Carlo") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const RateProfile prof(pair);
    const NetworkShape shape{9, 2, 0};
    const double z = 1.4282;

    for (const DetectorSpec& spec :
         {DetectorSpec{SecureSpec{z}}, DetectorSpec{TrimmedSpec{}}}) {
        const auto exact = exact_rate_target_errors(prof, shape, spec, z, 4);

        ScenarioConfig cfg(pair);
        cfg.shape = shape;
        cfg.detector = spec;
        cfg.attack = {AttackSpec::Kind::RateTarget, z};
        cfg.horizon = 4;
        cfg.trials = 60000;
        cfg.master_seed = 77;
        const auto mc = run_scenario(cfg);
        for (int k = 0; k < 4; ++k) {
            CHECK(std::fabs(exact[k].p_err0 - mc.per_k[k].p_err0) <=
                  3.0 * mc.per_k[k].se0 + 1e-9);
            CHECK(std::fabs(exact[k].p_err1 - mc.per_k[k].p_err1) <=
                  3.0 * mc.per_k[k].se1 + 1e-9);
        }
    }

    // n_attacked = 0 gives the exact no-attack curve
    const auto benign = exact_rate_target_errors(prof, shape, SecureSpec{z}, z, 3, 0);
    ScenarioConfig cfg(pair);
    cfg.shape = shape;
    cfg.detector = SecureSpec{z};
    cfg.horizon = 3;
    cfg.trials = 60000;
    cfg.master_seed = 78;
    const auto mc = run_scenario(cfg);
    for (int k = 0; k < 3; ++k) {
        // binomial sigma at the exact value covers zero-hit MC cells
        const double sigma =
            std::max(std::max(mc.per_k[k].se0, mc.per_k[k].se1),
                     std::sqrt(benign[k].worst / static_cast<double>(cfg.trials)));
        CHECK(std::fabs(benign[k].worst - mc.per_k[k].worst) <= 3.0 * sigma + 1e-9);
    }

    CHECK_THROWS_AS(
        exact_rate_target_errors(RateProfile(DistributionPair::gaussian_shift(1, 0, 1)),
                                 shape, SecureSpec{0.5}, 0.5, 3),
        UnsupportedPair);
}

TEST_CASE("scenario validation") {
    ScenarioConfig cfg(DistributionPair::bernoulli(0.3, 0.7));
    cfg.shape = NetworkShape{3, 1, 0};
    cfg.detector = BayesSpec{};
    cfg.attack = {AttackSpec::Kind::RateTarget, 0.1};
    cfg.sampler.kind = SamplerSpec::Kind::Tilted;
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);

    cfg.sampler.kind = SamplerSpec::Kind::Plain;
    cfg.horizon = 0;
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
    cfg.horizon = 5;
    cfg.trials = 0;
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
    cfg.trials = 10;
    cfg.fit_window = std::make_pair(2, 9);
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);

    cfg.fit_window.reset();
    cfg.detector = QOutOfMSpec{{2, 3}};  // shorter than the horizon
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("fixed-theta modes populate only their side") {
    ScenarioConfig cfg(DistributionPair::bernoulli(0.3, 0.7));
    cfg.shape = NetworkShape{1, 0, 0};
    cfg.detector = BayesSpec{};
    cfg.horizon = 2;
    cfg.trials = 2000;
    cfg.theta_mode = ThetaMode::Fixed0;
    const auto est = run_scenario(cfg);
    CHECK(est.per_k[0].p_err0 > 0.0);
    CHECK(est.per_k[0].p_err1 == 0.0);
    CHECK(est.per_k[0].worst == est.per_k[0].p_err0);
}

TEST_CASE("security sweep smoke run") {
    const auto pair = DistributionPair::bernoulli(0.02, 0.6);
    const NetworkShape shape{9, 2, 0};
    const RateProfile prof(pair);
    const double cap = 5.0 * prof.chernoff();
    const auto rows = sweep_security_efficiency(pair, shape, {0.0, cap}, 30000, 8, 11);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].z_s == 0.0);
    CHECK(rows[0].measured_security == 0.0);
    CHECK(rows[0].theory_h_e == doctest::Approx(9.0 * prof.chernoff()).epsilon(1e-9));
    CHECK(rows[0].measured_efficiency > 2.2);
    // near the security cap the rate-target attack is tight; the short
    // horizon leaves a downward finite-time bias
    CHECK(rows[1].measured_security > 1.0);
    CHECK(rows[1].measured_security < 2.2);
    CHECK(rows[1].theory_h_e >= rows[1].z_s);
    CHECK(rows[1].measured_efficiency > 2.2);
}

}  // TEST_SUITE
