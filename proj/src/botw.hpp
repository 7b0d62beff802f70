#pragma once

#include "core.hpp"
#include "ghp.hpp"
#include "robust.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace banditlab {

struct BotwConfig {
    double delta = 0.1;
    double constant_scale = 1.0;  // multiplies the 2^15 in beta_t
    std::uint64_t horizon = 0;    // T, used by f_T = ln T and the black box
    GhpParams blackbox;           // C_1, C_2 and L_0 are read from here
};

/// Phase-1 stochasticity test at epoch round t with r = sqrt(f_T C_1 t):
/// returns the unique arm x with sum y - sum l^_x >= -5 r while every other
/// arm has sum y - sum l^_x' <= -25 r.
std::optional<std::size_t> phase1_check(double sum_y, std::span<const double> sum_lhat, std::uint64_t t,
                                        std::uint64_t min_duration, double f_t, double c1);

/// Phase-2 estimator: x != x^: x^T S~^{-1} x_t y (inverse_row holds
/// x^T S~^{-1} x_t for every x); x = x^: y / p~_x^ when x_t = x^, else 0.
double phase2_estimate(std::size_t x, std::size_t x_t, double y, std::size_t x_hat, double p_hat,
                       double inverse_entry);

/// True when the gap statistic leaves [0.39 gap, 1.81 gap].
bool gap_interval_violated(double statistic, double frozen_gap);

/// True when sum_{s > t0} (y_s - l^_{s, x^}) >= 20 sqrt(f_T C_1 t0).
bool regret_test_triggers(double phase2_regret, double f_t, double c1, std::uint64_t t0);

struct BotwEpoch {
    std::uint64_t start = 0;   // global round of the epoch's first round
    std::uint64_t min_duration = 0;
    std::uint64_t t0 = 0;      // epoch-local round where Phase 1 ended (0 when it never did)
    std::optional<std::size_t> x_hat;
    std::uint64_t length = 0;
    int end_reason = 0;        // 0 running or truncated, 1 gap test, 2 regret test
};

class Botw {
public:
    Botw(const ActionSet& actions, const BotwConfig& config);

    std::size_t choose(double u);
    void update(std::size_t arm, double y);

    int phase() const noexcept { return phase_; }
    int epoch() const noexcept { return static_cast<int>(epochs_.size()) - 1; }
    const std::vector<BotwEpoch>& epochs() const noexcept { return epochs_; }
    std::uint64_t local_round() const noexcept { return t_; }
    std::uint64_t min_duration() const noexcept { return l_; }
    double f_t() const noexcept { return f_t_; }

    std::optional<std::size_t> x_hat() const noexcept { return x_hat_; }
    std::uint64_t t0() const noexcept { return t0_; }
    /// Gaps frozen at the end of Phase 1.
    const std::vector<double>& frozen_gaps() const noexcept { return frozen_gaps_; }
    /// p~ of the upcoming Phase-2 round.
    const ArmDistribution& phase2_distribution() const noexcept { return p_tilde_; }
    const ArmDistribution& op_distribution() const noexcept { return p_op_; }
    int op_cache_key() const noexcept { return op_key_; }
    const std::vector<double>& last_estimates() const noexcept { return last_; }
    /// sum_{s > t0} (y_s - l^_{s, x^})
    double phase2_regret() const noexcept { return phase2_regret_; }
    /// Average empirical gaps at the current round by full Catoni solves
    /// (entry for x^ is 0).
    std::vector<double> gap_statistic() const;
    const GeometricHedge* blackbox() const noexcept { return ghp_.get(); }

private:
    void start_epoch(std::uint64_t min_duration);
    void enter_phase2(std::size_t x_hat);
    void refresh_op();
    bool gap_test_fails(std::size_t x) const;
    double alpha(std::size_t x) const;

    const ActionSet* actions_;
    BotwConfig config_;
    double f_t_ = 0.0;
    std::uint64_t global_ = 0;

    std::vector<BotwEpoch> epochs_;
    int phase_ = 1;
    std::uint64_t l_ = 0;
    std::uint64_t t_ = 0;
    std::unique_ptr<GeometricHedge> ghp_;
    double sum_y_ = 0.0;
    std::vector<double> sum_lhat_;

    std::optional<std::size_t> x_hat_;
    std::uint64_t t0_ = 0;
    std::vector<double> frozen_gaps_;
    std::vector<double> phase1_sum_;
    double sum_lhat_xhat_ = 0.0;
    double phase2_regret_ = 0.0;
    std::vector<SampleMultiset> buffers_;
    std::vector<double> cum_norm_sq_;
    int op_key_ = -1;
    ArmDistribution p_op_;
    ArmDistribution p_tilde_;
    Matrix table_;
    std::vector<double> last_;
};

}  // namespace banditlab
