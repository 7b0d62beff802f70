#include "reolb.hpp"

#include "design.hpp"
#include "errors.hpp"

#include <algorithm>

namespace banditlab {

double unbiased_estimate(const Vector& x, const Vector& x_t, double y, const SpdFactor& s) {
    if (y == 0.0) return 0.0;
    return s.bilinear(x, x_t) * y;
}

std::vector<double> gaps_from_robust(std::span<const double> robust_means) {
    if (robust_means.empty()) return {};
    const double lowest = *std::min_element(robust_means.begin(), robust_means.end());
    std::vector<double> out(robust_means.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = robust_means[i] - lowest;
    return out;
}

Reolb::Reolb(const ActionSet& actions, const ReolbConfig& config) : actions_(&actions), config_(config) {
    if (!(config.delta > 0.0 && config.delta <= 0.1)) throw BanditError(ErrorCode::ConfigError, "delta must lie in (0, 0.1]");
    if (!(config.constant_scale > 0.0)) throw BanditError(ErrorCode::ConfigError, "constant_scale must be positive");
    const auto n = actions.size();
    gaps_.assign(n, 0.0);
    last_.assign(n, 0.0);
    buffers_.resize(n);
}

void Reolb::begin_block() {
    if (!rob_prev_.empty()) gaps_ = gaps_from_robust(rob_prev_);
    const std::uint64_t len = block_length();
    beta_ = beta_t(len, actions_->size(), config_.delta, config_.constant_scale);
    p_ = solve_op(len, gaps_, *actions_, beta_).p;
    table_ = inverse_form_table(gram(p_.weights(), *actions_), *actions_);
    for (auto& b : buffers_) b.clear();
    in_block_ = 0;
    open_ = true;
}

void Reolb::end_block() {
    const auto n = actions_->size();
    rob_prev_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double alpha = alpha_block(m_, table_(ii, ii), n, config_.delta);
        rob_prev_[i] = clip(catoni_estimate(buffers_[i], alpha), -1.0, 1.0);
    }
    ++m_;
    open_ = false;
}

std::size_t Reolb::choose(double u) {
    if (!open_) begin_block();
    return p_.sample(u);
}

void Reolb::update(std::size_t arm, double y) {
    if (!open_) throw BanditError(ErrorCode::DomainError, "update without an open block");
    const auto n = actions_->size();
    if (arm >= n) throw BanditError(ErrorCode::DomainError, "arm index out of range");
    for (std::size_t i = 0; i < n; ++i) {
        last_[i] = table_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(arm)) * y;
        buffers_[i].add(last_[i]);
    }
    ++rounds_;
    if (++in_block_ == block_length()) end_block();
}

}  // namespace banditlab
