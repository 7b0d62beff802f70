#include "ghp.hpp"

#include "design.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace banditlab {

GhpRates ghp_rates(std::size_t d, std::uint64_t horizon, std::size_t n_arms, double log_inv_delta_prime) {
    const double dd = static_cast<double>(d);
    const double tt = static_cast<double>(horizon);
    GhpRates r;
    r.gamma = std::min(0.5, std::sqrt(dd * (std::log(static_cast<double>(n_arms)) + log_inv_delta_prime) / tt));
    r.eta = r.gamma / (dd + 2.0 * dd * std::sqrt(log_inv_delta_prime / (dd * tt)));
    return r;
}

GhpParams ghp_params(std::size_t d, std::uint64_t horizon, std::size_t n_arms, double delta, double scale, double c2) {
    if (horizon < 2) throw BanditError(ErrorCode::DomainError, "GeometricHedge needs T >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw BanditError(ErrorCode::DomainError, "delta must lie in (0, 1)");
    GhpParams p;
    p.horizon = horizon;
    p.dim = d;
    p.delta_prime = delta / (static_cast<double>(n_arms) * std::log2(static_cast<double>(horizon)));
    p.log_inv_delta_prime = -std::log(p.delta_prime);
    const auto rates = ghp_rates(d, horizon, n_arms, p.log_inv_delta_prime);
    p.gamma = rates.gamma;
    p.eta = rates.eta;
    const double log_t = std::log(static_cast<double>(horizon) / p.delta_prime);
    p.c1 = scale * 32768.0 * static_cast<double>(d) * log_t;
    p.l0 = scale * 32768.0 * static_cast<double>(d) * log_t * log_t;
    p.c2 = c2;
    return p;
}

double GeometricHedge::optimistic(double lhat, double norm_sq, double bonus_rate) noexcept {
    return lhat - 2.0 * norm_sq * bonus_rate;
}

GeometricHedge::GeometricHedge(const ActionSet& actions, const GhpParams& params)
    : actions_(&actions), params_(params) {
    const auto n = actions.size();
    if (!(params.gamma > 0.0 && params.gamma <= 0.5)) throw BanditError(ErrorCode::DomainError, "gamma must lie in (0, 1/2]");
    bonus_rate_ = std::sqrt(params.log_inv_delta_prime / (static_cast<double>(actions.dim()) * static_cast<double>(params.horizon)));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    exploration_ = exploration_design(all, actions, 0.5 / static_cast<double>(n));
    log_w_.assign(n, 0.0);
    lhat_.assign(n, 0.0);
    ltilde_.assign(n, 0.0);
    lhat_sum_.assign(n, 0.0);
    refresh_distribution();
}

void GeometricHedge::refresh_distribution() {
    const auto n = log_w_.size();
    const double top = *std::max_element(log_w_.begin(), log_w_.end());
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::exp(log_w_[i] - top);
        total += w[i];
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = (1.0 - params_.gamma) * w[i] / total + params_.gamma * exploration_[i];
        mass += w[i];
    }
    for (auto& v : w) v /= mass;
    p_ = ArmDistribution(std::move(w));
}

void GeometricHedge::update(std::size_t arm, double y) {
    const auto n = actions_->size();
    if (arm >= n) throw BanditError(ErrorCode::DomainError, "arm index out of range");
    const Matrix& x = actions_->matrix();
    const Matrix s = gram(p_.weights(), *actions_).matrix();
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) throw BanditError(ErrorCode::SingularDirection, "S(p_t) is singular");
    const Matrix s_inv_xt = llt.solve(x.transpose());
    const Vector v = s_inv_xt.col(static_cast<Eigen::Index>(arm));
    const Vector lhat = (x * v) * y;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double norm_sq = x.row(ii).dot(s_inv_xt.col(ii));
        lhat_[i] = lhat(ii);
        ltilde_[i] = optimistic(lhat_[i], norm_sq, bonus_rate_);
        lhat_sum_[i] += lhat_[i];
        max_eta_loss_ = std::max(max_eta_loss_, std::abs(params_.eta * ltilde_[i]));
        log_w_[i] -= params_.eta * ltilde_[i];
    }
    const double top = *std::max_element(log_w_.begin(), log_w_.end());
    for (auto& lw : log_w_) lw -= top;
    ++rounds_;
    refresh_distribution();
}

GhpAudit ghp_audit(const Environment& env, const GhpParams& params, std::uint64_t horizon, std::uint64_t seed) {
    const auto n = env.actions().size();
    GeometricHedge ghp(env.actions(), params);
    std::vector<double> true_sum(n, 0.0);
    double learner = 0.0;
    GhpAudit audit;
    audit.worst_slack = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const std::size_t arm = ghp.choose(RngStream::uniform_at(seed, kAlgorithmStream, t));
        const Vector loss = env.loss(t);
        const Vector means = env.actions().matrix() * loss;
        learner += means(static_cast<Eigen::Index>(arm));
        for (std::size_t i = 0; i < n; ++i) true_sum[i] += means(static_cast<Eigen::Index>(i));
        ghp.update(arm, env.observe(seed, t, arm));
        if (static_cast<double>(t) < params.l0) continue;
        const double root = std::sqrt(params.c1 * static_cast<double>(t));
        for (std::size_t i = 0; i < n; ++i) {
            const double lhs = learner - true_sum[i];
            const double rhs = root - params.c2 * std::abs(true_sum[i] - ghp.cumulative_estimates()[i]);
            const double slack = rhs - lhs;
            if (slack < audit.worst_slack) audit.worst_slack = slack;
            if (slack < 0.0 && audit.holds) {
                audit.holds = false;
                audit.first_violation = t;
                audit.arm = i;
            }
        }
    }
    return audit;
}

}  // namespace banditlab
