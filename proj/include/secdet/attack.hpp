#ifndef SECDET_ATTACK_HPP
#define SECDET_ATTACK_HPP

#include <memory>
#include <span>
#include <vector>

#include "secdet/rates.hpp"
#include "secdet/limits.hpp"

namespace secdet {

// The attacker's standing information for one scenario: which sensors it
// controls and the true hypothesis.  The compromised set is fixed for
// the lifetime of a trial.
struct AttackContext {
    std::vector<int> compromised;  // 0-based indices
    int theta = 0;
};

// admissibility of one injected bias vector: support inside the
// compromised set, which itself has at most n elements
bool validate_admissible(const AttackContext& ctx, std::span<const double> bias, int n);

// Causal attack strategy.  Per time step the harness hands over the true
// measurements of the compromised sensors and receives a bias vector
// (length m, zero outside the compromised set).  Attack objects are
// trial-private; reset() clears any per-trial state.
class Attack {
public:
    virtual ~Attack() = default;
    virtual std::vector<int> compromised_set(const NetworkShape& shape, int theta) const = 0;
    virtual void reset() {}
    virtual void bias(const AttackContext& ctx, std::span<const double> y_true_compromised,
                      int k, RngStream& rng, std::span<double> bias_out) = 0;
};

class NoAttack final : public Attack {
public:
    std::vector<int> compromised_set(const NetworkShape&, int) const override { return {}; }
    void bias(const AttackContext&, std::span<const double>, int, RngStream&,
              std::span<double> bias_out) override {
        std::fill(bias_out.begin(), bias_out.end(), 0.0);
    }
};

// Distribution-flipping attack: compromised sensors report fresh draws
// from the opposite hypothesis law.  The compromised set is {1..n} when
// theta = 0 and {m-n+1..m} (minus any overlap with the first set) when
// theta = 1, so the flipped sensors carry no information about theta.
class FlipAttack final : public Attack {
public:
    explicit FlipAttack(const DistributionPair& pair) : pair_(&pair) {}
    std::vector<int> compromised_set(const NetworkShape& shape, int theta) const override;
    void bias(const AttackContext& ctx, std::span<const double> y_true_compromised, int k,
              RngStream& rng, std::span<double> bias_out) override;

private:
    const DistributionPair* pair_;
};

// Rate-targeting attack: each compromised sensor reports values that
// hold its running llr mean as close as possible to the point x* where
// I_theta(x*) = z_s, never letting I_theta drop below z_s once that is
// achievable.  Continuous pairs hit x* exactly from k = 1; discrete
// pairs pick the best support point each step (the constraint wins over
// distance once feasible).
class RateTargetAttack final : public Attack {
public:
    // n_actual limits how many sensors are really compromised; -1 uses
    // the shape's full budget
    RateTargetAttack(const RateProfile& profile, double z_s, int n_actual = -1);
    std::vector<int> compromised_set(const NetworkShape& shape, int theta) const override;
    void reset() override;
    void bias(const AttackContext& ctx, std::span<const double> y_true_compromised, int k,
              RngStream& rng, std::span<double> bias_out) override;

    // whether z_s exceeded the attainable branch range and the target
    // was clamped to the branch endpoint
    bool target_clamped() const { return clamped_[0] || clamped_[1]; }
    // first time index at which every compromised sensor met the rate
    // constraint (discrete pairs may need a burn-in); 0 if never
    int constraint_met_from() const { return constraint_met_from_; }

private:
    const RateProfile* profile_;
    double z_s_;
    int n_actual_;
    double target_[2];   // x* per theta
    bool clamped_[2] = {false, false};
    std::vector<double> reported_mean_;  // indexed by position in ctx.compromised
    int constraint_met_from_ = 0;
    bool all_met_ = false;
};

std::unique_ptr<Attack> make_no_attack();

}  // namespace secdet

#endif
