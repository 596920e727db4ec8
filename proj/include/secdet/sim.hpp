#ifndef SECDET_SIM_HPP
#define SECDET_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secdet/attack.hpp"
#include "secdet/detect.hpp"

namespace secdet {

enum class ThetaMode { Both, Fixed0, Fixed1 };

struct AttackSpec {
    enum class Kind { None, Flip, RateTarget } kind = Kind::None;
    double z_s = 0.0;   // RateTarget only
    int n_actual = -1;  // RateTarget: how many sensors are actually
                        // compromised (-1 = the shape's full budget n);
                        // drives the unknown-count performance runs
};

struct SamplerSpec {
    enum class Kind { Plain, Tilted } kind = Kind::Plain;
    bool auto_w = true;  // tilt at wstar, the dominating point of the Bayes error event
    double w = 0.0;      // used when auto_w is false
};

struct ScenarioConfig {
    explicit ScenarioConfig(DistributionPair p) : pair(std::move(p)) {}

    DistributionPair pair;
    NetworkShape shape;
    DetectorSpec detector;
    AttackSpec attack;
    ThetaMode theta_mode = ThetaMode::Both;
    int horizon = 40;
    long long trials = 10000;
    std::uint64_t master_seed = 1;
    SamplerSpec sampler;
    std::optional<std::pair<int, int>> fit_window;  // defaults to the last
                                                    // half of the ks with
                                                    // positive estimates
    int threads = 0;  // 0 = hardware concurrency
};

struct PerKError {
    int k = 0;
    double p_err0 = 0.0, se0 = 0.0;  // theta = 0 wrongly decided 1
    double p_err1 = 0.0, se1 = 0.0;  // theta = 1 wrongly decided 0
    double worst = 0.0;              // max over the simulated thetas
};

struct ErrorEstimate {
    std::vector<PerKError> per_k;
    double fitted_exponent = 0.0;
    std::pair<int, int> fit_window{0, 0};
};

// least-squares slope of -log(worst error) against k over [window.first,
// window.second], using only ks with positive estimates; throws
// InsufficientData below 4 usable points
double fit_exponent(const std::vector<PerKError>& curve, std::pair<int, int> window);

// asymptotic-rate estimate from the three-parameter fit
// -log(worst) = rho k - a log k - b, returning rho.  Large-deviation
// error curves carry polynomial prefactors, so the plain slope reads
// low by O(a/k) over short windows; this absorbs the prefactor.
// Discrete pairs under attack need it most: their error curves are
// staircases of integer hit-count event families.
double fit_exponent_log_corrected(const std::vector<PerKError>& curve,
                                  std::pair<int, int> window);

// Runs the scenario: per time step and hypothesis, the probability of a
// wrong decision with its standard error, plus the fitted error
// exponent.  Under tilted sampling the benign sensors draw from the
// exponentially tilted law and each error indicator carries the
// likelihood-ratio weight; weights accumulate in log space.  Trials are
// distributed over a worker pool in fixed blocks and reduced in block
// order, so results are bit-identical for any thread count.
ErrorEstimate run_scenario(const ScenarioConfig& cfg);

// Exact per-k error probabilities of a detector under the rate-target
// attack, for binary pairs.  The attacked sensors follow a
// deterministic trajectory and the benign sensors are i.i.d. binary, so
// the error probability is a finite sum over benign hit-count
// multisets, evaluated against the real decision rule.  Deterministic
// (no sampling); cost grows as C(k + m - n, m - n) per step, so keep
// the horizon moderate (~30 for m - n = 7).
// n_attacked overrides how many sensors the attacker holds (-1 = the
// shape's n, 0 = no attacker, giving exact no-attack error curves).
std::vector<PerKError> exact_rate_target_errors(const RateProfile& profile,
                                                const NetworkShape& shape,
                                                const DetectorSpec& detector, double attack_z,
                                                int horizon, int n_attacked = -1,
                                                int threads = 0);

struct SweepRow {
    double z_s = 0.0;
    double measured_efficiency = 0.0;
    double measured_security = 0.0;
    double theory_h_e = 0.0;
};

// Efficiency/security sweep over a security-target grid: per grid point, the no-attack efficiency (tilted
// sampling) and the rate-target-attack security (plain sampling) of the
// secure detector, against the theoretical h_e curve.  At z_s = 0 the
// rate-target attack degenerates to mimicking the benign law, so the
// security exponent is reported as 0 without a run.
std::vector<SweepRow> sweep_security_efficiency(const DistributionPair& pair,
                                                const NetworkShape& shape,
                                                const std::vector<double>& z_s_grid,
                                                long long trials, int horizon,
                                                std::uint64_t master_seed);

}  // namespace secdet

#endif
