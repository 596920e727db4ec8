#include "secdet/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace secdet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long long kBlockSize = 256;

// streaming log-sum-exp accumulator
struct LogSum {
    double mx = kNegInf;
    double s = 0.0;

    void add(double lw) {
        if (lw <= mx) {
            s += std::exp(lw - mx);
        } else {
            s = s * std::exp(mx - lw) + 1.0;
            mx = lw;
        }
    }
    void merge(const LogSum& o) {
        if (o.mx == kNegInf) return;
        if (o.mx <= mx) {
            s += o.s * std::exp(o.mx - mx);
        } else {
            s = s * std::exp(mx - o.mx) + o.s;
            mx = o.mx;
        }
    }
    double value() const { return mx == kNegInf ? 0.0 : std::exp(mx) * s; }
};

struct BlockAcc {
    std::vector<LogSum> w;   // sum of weights over error trials, per k
    std::vector<LogSum> w2;  // sum of squared weights, per k
    explicit BlockAcc(int horizon) : w(horizon), w2(horizon) {}
    void merge(const BlockAcc& o) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i].merge(o.w[i]);
            w2[i].merge(o.w2[i]);
        }
    }
};

std::unique_ptr<Attack> make_attack(const AttackSpec& spec, const RateProfile& profile) {
    switch (spec.kind) {
        case AttackSpec::Kind::None:
            return std::make_unique<NoAttack>();
        case AttackSpec::Kind::Flip:
            return std::make_unique<FlipAttack>(profile.pair());
        case AttackSpec::Kind::RateTarget:
            return std::make_unique<RateTargetAttack>(profile, spec.z_s, spec.n_actual);
    }
    return nullptr;
}

// everything one worker needs to run a trial for a fixed theta
struct TrialRunner {
    const ScenarioConfig* cfg;
    const RateProfile* profile;
    int theta;
    double tilt_w;
    bool tilted;

    Detector detector;
    std::unique_ptr<Attack> attack;
    AttackContext ctx;
    std::vector<char> is_compromised;
    std::vector<double> y, bias, y_compromised;
    std::vector<RngStream> sensor_rngs;

    TrialRunner(const ScenarioConfig& c, const RateProfile& p, int th, double w)
        : cfg(&c),
          profile(&p),
          theta(th),
          tilt_w(w),
          tilted(c.sampler.kind == SamplerSpec::Kind::Tilted),
          detector(c.detector, c.shape, p),
          attack(make_attack(c.attack, p)) {
        ctx.theta = theta;
        ctx.compromised = attack->compromised_set(c.shape, theta);
        is_compromised.assign(c.shape.m, 0);
        for (int i : ctx.compromised) is_compromised[i] = 1;
        y.resize(c.shape.m);
        bias.resize(c.shape.m);
        y_compromised.resize(ctx.compromised.size());
    }

    // records (k -> log weight) for the error steps into acc
    void run(long long trial, BlockAcc& acc) {
        detector.reset();
        attack->reset();
        sensor_rngs.clear();
        for (int i = 0; i < cfg->shape.m; ++i)
            sensor_rngs.push_back(
                RngStream::derive(cfg->master_seed, static_cast<std::uint64_t>(theta),
                                  static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(i)));
        RngStream attack_rng = RngStream::derive(cfg->master_seed,
                                                 static_cast<std::uint64_t>(theta),
                                                 static_cast<std::uint64_t>(trial),
                                                 0xa77acc00ull);
        const auto& pair = profile->pair();
        const bool no_attack = ctx.compromised.empty();
        double lw = 0.0;

        for (int k = 1; k <= cfg->horizon; ++k) {
            for (int i = 0; i < cfg->shape.m; ++i) {
                if (!is_compromised[i] && tilted) {
                    y[i] = pair.sample_tilted(theta, tilt_w, sensor_rngs[i]);
                    lw += pair.tilt_log_weight(theta, tilt_w, y[i]);
                } else {
                    y[i] = pair.sample(theta, sensor_rngs[i]);
                }
            }
            if (!no_attack) {
                for (std::size_t idx = 0; idx < ctx.compromised.size(); ++idx)
                    y_compromised[idx] = y[ctx.compromised[idx]];
                attack->bias(ctx, y_compromised, k, attack_rng, bias);
                if (!validate_admissible(ctx, bias, cfg->shape.n))
                    throw ConfigError("attack produced an inadmissible bias vector");
                for (int i : ctx.compromised) y[i] += bias[i];
            }
            const Decision d = detector.step(y);
            const double err = theta == 0 ? d.value : 1.0 - d.value;
            if (err > 0.0) {
                const double le = lw + std::log(err);
                acc.w[k - 1].add(le);
                acc.w2[k - 1].add(2.0 * le);
            }
        }
    }
};

// per-theta estimates: (probability, standard error) per k
void estimate_theta(const ScenarioConfig& cfg, const RateProfile& profile, int theta,
                    double tilt_w, std::vector<double>& p_out, std::vector<double>& se_out) {
    const long long n_trials = cfg.trials;
    const long long n_blocks = (n_trials + kBlockSize - 1) / kBlockSize;
    std::vector<BlockAcc> blocks(static_cast<std::size_t>(n_blocks), BlockAcc(cfg.horizon));

    int n_threads = cfg.threads > 0 ? cfg.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(std::min<long long>(n_threads, n_blocks));

    std::atomic<long long> next_block{0};
    auto worker = [&]() {
        TrialRunner runner(cfg, profile, theta, tilt_w);
        for (;;) {
            const long long b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            const long long lo = b * kBlockSize;
            const long long hi = std::min(n_trials, lo + kBlockSize);
            for (long long t = lo; t < hi; ++t) runner.run(t, blocks[b]);
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // deterministic reduction in block order
    BlockAcc total(cfg.horizon);
    for (const auto& b : blocks) total.merge(b);

    p_out.resize(cfg.horizon);
    se_out.resize(cfg.horizon);
    const double n = static_cast<double>(n_trials);
    for (int k = 0; k < cfg.horizon; ++k) {
        const double s1 = total.w[k].value();
        const double s2 = total.w2[k].value();
        const double p = s1 / n;
        const double var = std::max(0.0, s2 / n - p * p);
        p_out[k] = p;
        se_out[k] = std::sqrt(var / n);
    }
}

void validate(const ScenarioConfig& cfg) {
    cfg.shape.validate();
    if (cfg.horizon < 1) throw ConfigError("scenario: horizon must be >= 1");
    if (cfg.trials < 1) throw ConfigError("scenario: trials must be >= 1");
    if (cfg.sampler.kind == SamplerSpec::Kind::Tilted &&
        cfg.attack.kind == AttackSpec::Kind::RateTarget)
        throw ConfigError("scenario: tilted sampling is only valid with attack none or flip");
    if (const auto* q = std::get_if<QOutOfMSpec>(&cfg.detector))
        if (static_cast<int>(q->q_schedule.size()) < cfg.horizon)
            throw ConfigError("scenario: q_schedule must cover the horizon");
    if (cfg.fit_window) {
        if (cfg.fit_window->first < 1 || cfg.fit_window->second > cfg.horizon ||
            cfg.fit_window->first > cfg.fit_window->second)
            throw ConfigError("scenario: fit window outside [1, horizon]");
    }
}

}  // namespace

double fit_exponent(const std::vector<PerKError>& curve, std::pair<int, int> window) {
    double sk = 0, sy = 0, skk = 0, sky = 0;
    int n = 0;
    for (const auto& row : curve) {
        if (row.k < window.first || row.k > window.second) continue;
        if (!(row.worst > 0.0)) continue;
        const double x = row.k;
        const double yv = -std::log(row.worst);
        sk += x;
        sy += yv;
        skk += x * x;
        sky += x * yv;
        ++n;
    }
    if (n < 4) throw InsufficientData("fit_exponent: need at least 4 positive points");
    const double denom = n * skk - sk * sk;
    return (n * sky - sk * sy) / denom;
}

double fit_exponent_log_corrected(const std::vector<PerKError>& curve,
                                  std::pair<int, int> window) {
    double s[3][3] = {};
    double t[3] = {};
    int n = 0;
    for (const auto& row : curve) {
        if (row.k < window.first || row.k > window.second) continue;
        if (!(row.worst > 0.0)) continue;
        // drop sub-resolution Monte-Carlo points (a handful of hits);
        // their quantization flattens the tail and wrecks the
        // three-parameter fit; exact curves carry zero standard errors
        const double se_worst = row.p_err0 >= row.p_err1 ? row.se0 : row.se1;
        if (se_worst > 0.5 * row.worst) continue;
        const double x[3] = {static_cast<double>(row.k), -std::log(static_cast<double>(row.k)),
                             -1.0};
        const double y = -std::log(row.worst);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) s[i][j] += x[i] * x[j];
            t[i] += x[i] * y;
        }
        ++n;
    }
    if (n < 5) throw InsufficientData("fit_exponent_log_corrected: need at least 5 points");

    // solve the 3x3 normal equations by Gaussian elimination
    double a[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] = s[i][j];
        a[i][3] = t[i];
    }
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
        for (int j = 0; j < 4; ++j) std::swap(a[c][j], a[p][j]);
        if (a[c][c] == 0.0) throw InsufficientData("fit_exponent_log_corrected: singular fit");
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (int j = 0; j < 4; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return a[0][3] / a[0][0];
}

ErrorEstimate run_scenario(const ScenarioConfig& cfg) {
    validate(cfg);
    RateProfile profile(cfg.pair);
    const double tilt_w = cfg.sampler.auto_w ? profile.wstar() : cfg.sampler.w;

    const bool run0 = cfg.theta_mode != ThetaMode::Fixed1;
    const bool run1 = cfg.theta_mode != ThetaMode::Fixed0;

    std::vector<double> p0(cfg.horizon, 0.0), se0(cfg.horizon, 0.0);
    std::vector<double> p1(cfg.horizon, 0.0), se1(cfg.horizon, 0.0);
    if (run0) estimate_theta(cfg, profile, 0, tilt_w, p0, se0);
    if (run1) estimate_theta(cfg, profile, 1, tilt_w, p1, se1);

    ErrorEstimate out;
    out.per_k.resize(cfg.horizon);
    for (int k = 1; k <= cfg.horizon; ++k) {
        auto& row = out.per_k[k - 1];
        row.k = k;
        row.p_err0 = p0[k - 1];
        row.se0 = se0[k - 1];
        row.p_err1 = p1[k - 1];
        row.se1 = se1[k - 1];
        if (run0 && run1)
            row.worst = std::max(row.p_err0, row.p_err1);
        else
            row.worst = run0 ? row.p_err0 : row.p_err1;
    }

    std::pair<int, int> window;
    if (cfg.fit_window) {
        window = *cfg.fit_window;
    } else {
        // last half of the ks with positive estimates
        int k_hi = 0;
        for (const auto& row : out.per_k)
            if (row.worst > 0.0) k_hi = row.k;
        const int k_lo = std::max(1, k_hi / 2);
        window = {k_lo, k_hi};
    }
    out.fit_window = window;
    try {
        out.fitted_exponent = fit_exponent(out.per_k, window);
    } catch (const InsufficientData&) {
        out.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

namespace {

// error probability of `det` at time k for one hypothesis, summed over
// all benign count multisets around the deterministic attacked statistics
double exact_attacked_error_at(const RateProfile& profile, const NetworkShape& shape,
                               const Detector& det, std::span<const double> attacked_lam,
                               int theta, int k) {
    const auto& pair = profile.pair();
    const int benign = shape.m - static_cast<int>(attacked_lam.size());
    const double p = theta == 0 ? pair.p0() : pair.p1();
    const double lam0 = pair.llr(0.0), lam1 = pair.llr(1.0);

    std::vector<double> pmf(k + 1), lam_of(k + 1);
    for (int c = 0; c <= k; ++c) {
        pmf[c] = std::exp(std::lgamma(k + 1.0) - std::lgamma(c + 1.0) -
                          std::lgamma(k - c + 1.0) + c * std::log(p) +
                          (k - c) * std::log1p(-p));
        lam_of[c] = (c * lam1 + (k - c) * lam0) / k;
    }
    std::vector<std::vector<double>> choose(benign + 1, std::vector<double>(benign + 1, 0.0));
    for (int a = 0; a <= benign; ++a) {
        choose[a][0] = 1.0;
        for (int b = 1; b <= a; ++b)
            choose[a][b] = choose[a - 1][b - 1] + (b <= a - 1 ? choose[a - 1][b] : 0.0);
    }

    std::vector<double> lam(shape.m);
    std::copy(attacked_lam.begin(), attacked_lam.end(), lam.begin());
    double err = 0.0;

    // enumerate benign count multisets as runs of equal counts; the
    // incremental binomial factors accumulate the multinomial weight
    auto rec = [&](auto&& self, int c_from, int placed, double weight) -> void {
        if (placed == benign) {
            const Decision d = det.evaluate(lam);
            const double e = theta == 0 ? d.value : 1.0 - d.value;
            err += weight * e;
            return;
        }
        for (int c = c_from; c <= k; ++c) {
            if (pmf[c] == 0.0) continue;
            double w = weight;
            for (int r = 1; placed + r <= benign; ++r) {
                w *= pmf[c];
                const double grouped = w * choose[benign - placed][r];
                if (grouped < 1e-45) break;  // below any error mass of interest
                for (int j = 0; j < r; ++j)
                    lam[attacked_lam.size() + placed + j] = lam_of[c];
                self(self, c + 1, placed + r, grouped);
            }
        }
    };
    rec(rec, 0, 0, 1.0);
    return err;
}

// the rate-target attack's reported statistic trajectory, which is
// deterministic for discrete pairs (the greedy choice never looks at
// the true measurements)
std::vector<double> attacked_trajectory(const RateProfile& profile, const NetworkShape& shape,
                                        double attack_z, int theta, int horizon) {
    RateTargetAttack attack(profile, attack_z, 1);
    AttackContext ctx;
    ctx.theta = theta;
    ctx.compromised = attack.compromised_set(shape, theta);
    std::vector<double> trajectory(horizon, 0.0);
    if (ctx.compromised.empty()) return trajectory;
    RngStream rng(0);
    std::vector<double> y_true(ctx.compromised.size(), 0.0), bias(shape.m);
    double mean = 0.0;
    for (int k = 1; k <= horizon; ++k) {
        attack.bias(ctx, y_true, k, rng, bias);
        const double reported = bias[ctx.compromised[0]];  // y_true is zero
        mean = ((k - 1.0) / k) * mean + profile.pair().llr(reported) / k;
        trajectory[k - 1] = mean;
    }
    return trajectory;
}

}  // namespace

std::vector<PerKError> exact_rate_target_errors(const RateProfile& profile,
                                                const NetworkShape& shape,
                                                const DetectorSpec& detector, double attack_z,
                                                int horizon, int n_attacked, int threads) {
    if (!profile.pair().binary())
        throw UnsupportedPair("exact_rate_target_errors requires a binary measurement model");
    shape.validate();
    if (horizon < 1) throw ConfigError("exact_rate_target_errors: horizon must be >= 1");
    const int attacked_count = n_attacked < 0 ? shape.n : std::min(n_attacked, shape.n);

    // per-theta deterministic attacked statistic at every step; all
    // compromised sensors share the same trajectory
    std::vector<std::vector<double>> trajectory(2);
    for (int theta = 0; theta < 2; ++theta)
        trajectory[theta] = attacked_trajectory(profile, shape, attack_z, theta, horizon);

    std::vector<PerKError> out(horizon);
    std::atomic<int> next{0};
    auto worker = [&]() {
        Detector det(detector, shape, profile);
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= 2 * horizon) break;
            const int theta = task % 2;
            const int k = task / 2 + 1;
            std::vector<double> attacked(attacked_count, trajectory[theta][k - 1]);
            const double e =
                exact_attacked_error_at(profile, shape, det, attacked, theta, k);
            if (theta == 0)
                out[k - 1].p_err0 = e;
            else
                out[k - 1].p_err1 = e;
        }
    };
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (int k = 1; k <= horizon; ++k) {
        out[k - 1].k = k;
        out[k - 1].worst = std::max(out[k - 1].p_err0, out[k - 1].p_err1);
    }
    return out;
}

std::vector<SweepRow> sweep_security_efficiency(const DistributionPair& pair,
                                                const NetworkShape& shape,
                                                const std::vector<double>& z_s_grid,
                                                long long trials, int horizon,
                                                std::uint64_t master_seed) {
    RateProfile profile(pair);
    TradeoffCurves curves(profile, shape);

    std::vector<SweepRow> rows;
    for (double z_s : z_s_grid) {
        SweepRow row;
        row.z_s = z_s;
        row.theory_h_e = curves.h_e(z_s);

        ScenarioConfig eff(pair);
        eff.shape = shape;
        eff.detector = SecureSpec{z_s};
        eff.attack = {AttackSpec::Kind::None, 0.0};
        eff.horizon = horizon;
        eff.trials = trials;
        eff.master_seed = master_seed;
        eff.sampler.kind = SamplerSpec::Kind::Tilted;
        row.measured_efficiency = run_scenario(eff).fitted_exponent;

        if (z_s > 0.0) {
            ScenarioConfig sec = eff;
            sec.attack = {AttackSpec::Kind::RateTarget, z_s};
            sec.sampler.kind = SamplerSpec::Kind::Plain;
            sec.master_seed = master_seed + 1;
            row.measured_security = run_scenario(sec).fitted_exponent;
        } else {
            row.measured_security = 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace secdet
