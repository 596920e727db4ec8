#include "secdet/attack.hpp"

#include <algorithm>
#include <cmath>

namespace secdet {

bool validate_admissible(const AttackContext& ctx, std::span<const double> bias, int n) {
    if (static_cast<int>(ctx.compromised.size()) > n) return false;
    for (int i = 0; i < static_cast<int>(bias.size()); ++i) {
        if (bias[i] == 0.0) continue;
        if (std::find(ctx.compromised.begin(), ctx.compromised.end(), i) ==
            ctx.compromised.end())
            return false;
    }
    return true;
}

std::vector<int> FlipAttack::compromised_set(const NetworkShape& shape, int theta) const {
    std::vector<int> set;
    if (theta == 0) {
        for (int i = 0; i < shape.n && i < shape.m; ++i) set.push_back(i);
    } else {
        for (int i = std::max(shape.m - shape.n, shape.n); i < shape.m; ++i) set.push_back(i);
    }
    return set;
}

void FlipAttack::bias(const AttackContext& ctx, std::span<const double> y_true_compromised,
                      int /*k*/, RngStream& rng, std::span<double> bias_out) {
    std::fill(bias_out.begin(), bias_out.end(), 0.0);
    const int flipped_theta = 1 - ctx.theta;
    for (std::size_t idx = 0; idx < ctx.compromised.size(); ++idx) {
        const double fake = pair_->sample(flipped_theta, rng);
        bias_out[ctx.compromised[idx]] = fake - y_true_compromised[idx];
    }
}

RateTargetAttack::RateTargetAttack(const RateProfile& profile, double z_s, int n_actual)
    : profile_(&profile), z_s_(z_s), n_actual_(n_actual) {
    if (z_s < 0.0) throw RangeError("rate_target attack: z_s must be nonnegative");
    for (int theta = 0; theta < 2; ++theta) {
        const double sup = profile.rate_branch_sup(theta);
        double z = z_s;
        if (z > sup) {  // target infeasible; clamp to the branch endpoint
            z = sup;
            clamped_[theta] = true;
        }
        target_[theta] = profile.inv_rate(theta, z);
    }
}

std::vector<int> RateTargetAttack::compromised_set(const NetworkShape& shape, int) const {
    int count = n_actual_ < 0 ? shape.n : std::min(n_actual_, shape.n);
    std::vector<int> set;
    for (int i = 0; i < count && i < shape.m; ++i) set.push_back(i);
    return set;
}

void RateTargetAttack::reset() {
    reported_mean_.clear();
    constraint_met_from_ = 0;
    all_met_ = false;
}

void RateTargetAttack::bias(const AttackContext& ctx, std::span<const double> y_true_compromised,
                            int k, RngStream& /*rng*/, std::span<double> bias_out) {
    std::fill(bias_out.begin(), bias_out.end(), 0.0);
    if (reported_mean_.empty()) reported_mean_.assign(ctx.compromised.size(), 0.0);

    const int theta = ctx.theta;
    const double xstar = target_[theta];
    const auto& pair = profile_->pair();
    bool met_now = true;

    for (std::size_t idx = 0; idx < ctx.compromised.size(); ++idx) {
        const double prev = reported_mean_[idx];
        double fake, new_mean;
        if (!pair.discrete()) {
            // place the running mean exactly on x*
            fake = pair.llr_inv(k * xstar - (k - 1) * prev);
            new_mean = xstar;
        } else {
            // greedy support-point choice: prefer points meeting the rate
            // constraint, then minimize the distance to x*
            double best_dist = 0.0;
            bool best_feasible = false;
            bool have = false;
            fake = 0.0;
            new_mean = prev;
            for (double y : pair.support_points()) {
                const double cand = ((k - 1) * prev + pair.llr(y)) / k;
                const bool feasible = profile_->rate_clamped(theta, cand) >= z_s_ - 1e-12;
                const double dist = std::fabs(cand - xstar);
                const bool better =
                    !have || (feasible && !best_feasible) ||
                    (feasible == best_feasible && dist < best_dist);
                if (better) {
                    have = true;
                    best_feasible = feasible;
                    best_dist = dist;
                    fake = y;
                    new_mean = cand;
                }
            }
            if (!best_feasible) met_now = false;
        }
        reported_mean_[idx] = new_mean;
        bias_out[ctx.compromised[idx]] = fake - y_true_compromised[idx];
    }

    if (met_now && !all_met_) {
        all_met_ = true;
        constraint_met_from_ = k;
    } else if (!met_now) {
        all_met_ = false;
        constraint_met_from_ = 0;
    }
}

std::unique_ptr<Attack> make_no_attack() { return std::make_unique<NoAttack>(); }

}  // namespace secdet
