#pragma once

#include "core.hpp"
#include "environments.hpp"

#include <cstdint>
#include <vector>

namespace banditlab {

struct GhpRates {
    double gamma = 0.5;
    double eta = 0.0;
};

/// gamma = min(1/2, sqrt(d ln(|X| / delta') / T)),
/// eta = gamma / (d + 2d sqrt(ln(1 / delta') / (d T))).
GhpRates ghp_rates(std::size_t d, std::uint64_t horizon, std::size_t n_arms, double log_inv_delta_prime);

struct GhpParams {
    double gamma = 0.5;
    double eta = 0.0;
    double delta_prime = 0.0;
    double log_inv_delta_prime = 0.0;
    double c1 = 0.0;
    double c2 = 20.0;
    double l0 = 0.0;
    std::uint64_t horizon = 0;
    std::size_t dim = 0;
};

/// delta' = delta / (|X| log2 T); C_1 = scale 2^15 d ln(T / delta');
/// L_0 = scale 2^15 d ln^2(T / delta'). Needs T >= 2.
GhpParams ghp_params(std::size_t d, std::uint64_t horizon, std::size_t n_arms, double delta, double scale,
                     double c2 = 20.0);

/// GeometricHedge with high-probability optimistic estimates and a
/// log-det exploration distribution in place of a John ellipsoid.
class GeometricHedge {
public:
    GeometricHedge(const ActionSet& actions, const GhpParams& params);

    const GhpParams& params() const noexcept { return params_; }
    const ArmDistribution& exploration() const noexcept { return exploration_; }
    /// p_t = (1 - gamma) w / W + gamma q for the upcoming round.
    const ArmDistribution& distribution() const noexcept { return p_; }
    std::size_t choose(double u) const { return p_.sample(u); }
    void update(std::size_t arm, double y);

    /// Per-arm unbiased estimates of the last update.
    const std::vector<double>& estimates() const noexcept { return lhat_; }
    const std::vector<double>& optimistic_estimates() const noexcept { return ltilde_; }
    const std::vector<double>& cumulative_estimates() const noexcept { return lhat_sum_; }
    const std::vector<double>& log_weights() const noexcept { return log_w_; }
    std::uint64_t rounds() const noexcept { return rounds_; }
    /// Largest |eta * l~| seen so far.
    double max_eta_loss() const noexcept { return max_eta_loss_; }

    /// l^ - 2 ||x||^2 sqrt(ln(1/delta') / (d T))
    static double optimistic(double lhat, double norm_sq, double bonus_rate) noexcept;

private:
    void refresh_distribution();

    const ActionSet* actions_;
    GhpParams params_;
    double bonus_rate_ = 0.0;
    ArmDistribution exploration_;
    ArmDistribution p_;
    std::vector<double> log_w_;
    std::vector<double> lhat_;
    std::vector<double> ltilde_;
    std::vector<double> lhat_sum_;
    std::uint64_t rounds_ = 0;
    double max_eta_loss_ = 0.0;
};

struct GhpAudit {
    bool holds = true;
    std::uint64_t first_violation = 0;  // round, 0 when none
    std::size_t arm = 0;
    double worst_slack = 0.0;  // min over checked (t, x) of rhs - lhs
};

/// Runs the black box alone for T rounds and checks, for every arm and
/// every t >= L_0,
///   sum_s (l_{s,x_s} - l_{s,x}) <= sqrt(C_1 t) - C_2 |sum_s (l_{s,x} - l^_{s,x})|
/// with l_{s,x} the true mean loss.
GhpAudit ghp_audit(const Environment& env, const GhpParams& params, std::uint64_t horizon, std::uint64_t seed);

}  // namespace banditlab
