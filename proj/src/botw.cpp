#include "botw.hpp"

#include "design.hpp"
#include "errors.hpp"
#include "linalg.hpp"

#include <bit>
#include <cmath>

namespace banditlab {

std::optional<std::size_t> phase1_check(double sum_y, std::span<const double> sum_lhat, std::uint64_t t,
                                        std::uint64_t min_duration, double f_t, double c1) {
    if (t < min_duration || sum_lhat.empty()) return std::nullopt;
    const double r = std::sqrt(f_t * c1 * static_cast<double>(t));
    std::size_t low = 0;
    for (double s : sum_lhat)
        if (sum_y - s <= -25.0 * r) ++low;
    if (low + 1 != sum_lhat.size()) return std::nullopt;
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < sum_lhat.size(); ++i) {
        const double margin = sum_y - sum_lhat[i];
        if (margin <= -25.0 * r || margin < -5.0 * r) continue;
        if (found) throw BanditError(ErrorCode::DomainError, "two arms pass the Phase-1 test");
        found = i;
    }
    return found;
}

double phase2_estimate(std::size_t x, std::size_t x_t, double y, std::size_t x_hat, double p_hat,
                       double inverse_entry) {
    if (x != x_hat) return inverse_entry * y;
    return x_t == x_hat ? y / p_hat : 0.0;
}

bool gap_interval_violated(double statistic, double frozen_gap) {
    return statistic < 0.39 * frozen_gap || statistic > 1.81 * frozen_gap;
}

bool regret_test_triggers(double phase2_regret, double f_t, double c1, std::uint64_t t0) {
    return phase2_regret >= 20.0 * std::sqrt(f_t * c1 * static_cast<double>(t0));
}

Botw::Botw(const ActionSet& actions, const BotwConfig& config) : actions_(&actions), config_(config) {
    if (!(config.delta > 0.0 && config.delta <= 0.1)) throw BanditError(ErrorCode::ConfigError, "delta must lie in (0, 0.1]");
    if (config.horizon < 2) throw BanditError(ErrorCode::ConfigError, "BOTW needs a horizon T >= 2");
    if (!(config.blackbox.c2 >= 20.0)) throw BanditError(ErrorCode::ConfigError, "the black box needs C_2 >= 20");
    if (!(config.blackbox.c1 > 0.0)) throw BanditError(ErrorCode::ConfigError, "the black box needs C_1 > 0");
    f_t_ = std::log(static_cast<double>(config.horizon));
    const auto n = actions.size();
    sum_lhat_.assign(n, 0.0);
    last_.assign(n, 0.0);
    start_epoch(static_cast<std::uint64_t>(std::max(1.0, std::ceil(config.blackbox.l0))));
}

void Botw::start_epoch(std::uint64_t min_duration) {
    const auto n = actions_->size();
    BotwEpoch e;
    e.start = global_ + 1;
    e.min_duration = min_duration;
    epochs_.push_back(e);
    phase_ = 1;
    l_ = min_duration;
    t_ = 0;
    ghp_ = std::make_unique<GeometricHedge>(*actions_, config_.blackbox);
    sum_y_ = 0.0;
    sum_lhat_.assign(n, 0.0);
    x_hat_.reset();
    t0_ = 0;
    frozen_gaps_.clear();
    phase1_sum_.clear();
    buffers_.clear();
    cum_norm_sq_.clear();
    op_key_ = -1;
}

void Botw::enter_phase2(std::size_t x_hat) {
    const auto n = actions_->size();
    x_hat_ = x_hat;
    t0_ = t_;
    frozen_gaps_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (i != x_hat) frozen_gaps_[i] = (sum_lhat_[i] - sum_lhat_[x_hat]) / static_cast<double>(t0_);
    phase1_sum_ = sum_lhat_;
    sum_lhat_xhat_ = sum_lhat_[x_hat];
    phase2_regret_ = 0.0;
    buffers_.assign(n, SampleMultiset{});
    cum_norm_sq_.assign(n, 0.0);
    op_key_ = -1;
    phase_ = 2;
    ghp_.reset();
    epochs_.back().t0 = t0_;
    epochs_.back().x_hat = x_hat;
}

void Botw::refresh_op() {
    const std::uint64_t next = t_ + 1;
    const int key = static_cast<int>(std::bit_width(next)) - 1;
    if (key == op_key_) return;
    const std::uint64_t tk = std::uint64_t{1} << key;
    const auto n = actions_->size();
    const double beta = beta_t(tk, n, config_.delta, config_.constant_scale);
    p_op_ = solve_op(tk, frozen_gaps_, *actions_, beta).p;
    p_tilde_ = ArmDistribution::mix(p_op_, ArmDistribution::point_mass(n, *x_hat_), 0.5);
    table_ = inverse_form_table(gram(p_tilde_.weights(), *actions_), *actions_);
    op_key_ = key;
}

std::size_t Botw::choose(double u) {
    if (phase_ == 1) return ghp_->choose(u);
    refresh_op();
    return p_tilde_.sample(u);
}

double Botw::alpha(std::size_t x) const {
    return alpha_phase2(t_, t0_, cum_norm_sq_[x], actions_->size(), config_.delta);
}

bool Botw::gap_test_fails(std::size_t x) const {
    // The statistic is increasing in Rob and the Catoni score is decreasing
    // in its argument, so each side of the interval test is one sign check.
    const double t = static_cast<double>(t_);
    const double span = static_cast<double>(t_ - t0_);
    const double a = alpha(x);
    const double r_lo = (0.39 * frozen_gaps_[x] * t - phase1_sum_[x] + sum_lhat_xhat_) / span;
    const double r_hi = (1.81 * frozen_gaps_[x] * t - phase1_sum_[x] + sum_lhat_xhat_) / span;
    if (r_lo > 1.0 || (r_lo > -1.0 && catoni_score(buffers_[x], a, r_lo) < 0.0)) return true;
    if (r_hi < -1.0 || (r_hi < 1.0 && catoni_score(buffers_[x], a, r_hi) > 0.0)) return true;
    return false;
}

std::vector<double> Botw::gap_statistic() const {
    const auto n = actions_->size();
    std::vector<double> out(n, 0.0);
    if (phase_ != 2 || t_ <= t0_) return out;
    const double t = static_cast<double>(t_);
    const double span = static_cast<double>(t_ - t0_);
    for (std::size_t x = 0; x < n; ++x) {
        if (x == *x_hat_) continue;
        const double rob = clip(catoni_estimate(buffers_[x], alpha(x)), -1.0, 1.0);
        out[x] = (phase1_sum_[x] + span * rob - sum_lhat_xhat_) / t;
    }
    return out;
}

void Botw::update(std::size_t arm, double y) {
    const auto n = actions_->size();
    if (arm >= n) throw BanditError(ErrorCode::DomainError, "arm index out of range");
    ++global_;
    ++t_;
    ++epochs_.back().length;

    if (phase_ == 1) {
        ghp_->update(arm, y);
        sum_y_ += y;
        last_ = ghp_->estimates();
        for (std::size_t i = 0; i < n; ++i) sum_lhat_[i] += last_[i];
        if (auto found = phase1_check(sum_y_, sum_lhat_, t_, l_, f_t_, config_.blackbox.c1)) enter_phase2(*found);
        return;
    }

    const std::size_t xh = *x_hat_;
    const auto col = static_cast<Eigen::Index>(arm);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        last_[i] = phase2_estimate(i, arm, y, xh, p_tilde_[xh], table_(ii, col));
        if (i == xh) continue;
        buffers_[i].add(last_[i]);
        cum_norm_sq_[i] += 2.0 * table_(ii, ii);
    }
    sum_lhat_xhat_ += last_[xh];
    phase2_regret_ += y - last_[xh];

    int reason = 0;
    for (std::size_t i = 0; i < n && reason == 0; ++i)
        if (i != xh && gap_test_fails(i)) reason = 1;
    if (reason == 0 && regret_test_triggers(phase2_regret_, f_t_, config_.blackbox.c1, t0_)) reason = 2;
    if (reason != 0) {
        epochs_.back().end_reason = reason;
        start_epoch(2 * t0_);
    }
}

}  // namespace banditlab
