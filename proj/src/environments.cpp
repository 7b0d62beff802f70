#include "environments.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace banditlab {

namespace {

constexpr double kMeanSlack = 1e-12;

double max_abs_inner(const ActionSet& actions, const Vector& v) {
    return (actions.matrix() * v).cwiseAbs().maxCoeff();
}

}  // namespace

NoiseModel parse_noise_model(const std::string& name) {
    if (name == "bernoulli") return NoiseModel::Bernoulli;
    if (name == "uniform_bounded") return NoiseModel::UniformBounded;
    throw BanditError(ErrorCode::ConfigError, "unknown noise model '" + name + "'");
}

const char* noise_model_name(NoiseModel model) {
    return model == NoiseModel::Bernoulli ? "bernoulli" : "uniform_bounded";
}

double draw_observation(double mean, NoiseModel model, double u) {
    if (!(std::abs(mean) <= 1.0 + kMeanSlack)) throw BanditError(ErrorCode::MeanOutOfRange, "observation mean outside [-1, 1]");
    mean = std::clamp(mean, -1.0, 1.0);
    double y = 0.0;
    if (model == NoiseModel::Bernoulli) {
        y = (u < 0.5 + 0.5 * mean) ? 1.0 : -1.0;
    } else {
        const double half = 1.0 - std::abs(mean);
        y = mean + half * (2.0 * u - 1.0);
    }
    if (!(y >= -1.0 && y <= 1.0)) throw BanditError(ErrorCode::MeanOutOfRange, "observation outside [-1, 1]");
    return y;
}

CorruptionSchedule CorruptionSchedule::none(std::size_t dim) {
    CorruptionSchedule s;
    s.direction_ = Vector::Zero(static_cast<Eigen::Index>(dim));
    return s;
}

CorruptionSchedule CorruptionSchedule::front_loaded(const BanditInstance& instance, double budget) {
    if (!(budget >= 0.0)) throw BanditError(ErrorCode::DomainError, "corruption budget must be nonnegative");
    CorruptionSchedule s;
    s.kind_ = Kind::FrontLoaded;
    s.direction_ = -2.0 * instance.theta();
    s.unit_cost_ = max_abs_inner(instance.actions(), s.direction_);
    s.budget_ = budget;
    return s;
}

CorruptionSchedule CorruptionSchedule::periodic(const BanditInstance& instance, double budget, std::uint64_t period) {
    if (period == 0) throw BanditError(ErrorCode::DomainError, "corruption period must be positive");
    CorruptionSchedule s = front_loaded(instance, budget);
    s.kind_ = Kind::Periodic;
    s.period_ = period;
    return s;
}

CorruptionSchedule CorruptionSchedule::target_optimal(const BanditInstance& instance, double budget) {
    if (!(budget >= 0.0)) throw BanditError(ErrorCode::DomainError, "corruption budget must be nonnegative");
    const Vector x_star = instance.actions().arm(instance.optimal_index());
    CorruptionSchedule s;
    s.kind_ = Kind::TargetOptimal;
    s.direction_ = instance.delta_min() / x_star.squaredNorm() * x_star;
    s.unit_cost_ = max_abs_inner(instance.actions(), s.direction_);
    s.budget_ = budget;
    const Vector shifted = instance.theta() + s.direction_;
    if (budget > 0.0 && max_abs_inner(instance.actions(), shifted) > 1.0 + kMeanSlack)
        throw BanditError(ErrorCode::AdmissibilityViolation, "target_optimal corruption pushes a mean outside [-1, 1]");
    return s;
}

double CorruptionSchedule::fraction(std::uint64_t t) const {
    if (kind_ == Kind::None || unit_cost_ <= 0.0 || budget_ <= 0.0 || t == 0) return 0.0;
    std::uint64_t k = t;
    if (kind_ == Kind::Periodic) {
        if (t % period_ != 0) return 0.0;
        k = t / period_;
    }
    const double remaining = budget_ - static_cast<double>(k - 1) * unit_cost_;
    return std::clamp(remaining / unit_cost_, 0.0, 1.0);
}

Vector CorruptionSchedule::at(std::uint64_t t) const { return fraction(t) * direction_; }

double CorruptionSchedule::amount(std::uint64_t t) const { return fraction(t) * unit_cost_; }

CorruptionTotals corruption_totals(const CorruptionSchedule& schedule, std::uint64_t horizon,
                                   std::span<const std::uint64_t> block_starts) {
    if (block_starts.empty() || block_starts.front() != 1 || !std::is_sorted(block_starts.begin(), block_starts.end()))
        throw BanditError(ErrorCode::DomainError, "block starts must be increasing and begin at round 1");
    CorruptionTotals out;
    out.per_block.assign(block_starts.size(), 0.0);
    std::size_t k = 0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        while (k + 1 < block_starts.size() && t >= block_starts[k + 1]) ++k;
        out.per_block[k] += schedule.amount(t);
    }
    for (double c : out.per_block) out.total += c;
    return out;
}

std::uint64_t LowerBoundPair::interval_start(std::size_t i) const {
    std::uint64_t start = 1;
    for (std::size_t j = 1; j < i && j <= intervals.size(); ++j) start += intervals[j - 1];
    return start;
}

std::size_t LowerBoundPair::interval_of(std::uint64_t t) const {
    std::uint64_t end = 0;
    for (std::size_t j = 0; j < intervals.size(); ++j) {
        end += intervals[j];
        if (t <= end) return j + 1;
    }
    return intervals.size();
}

std::vector<std::uint64_t> lowerbound_intervals(double delta_min, double gamma, std::uint64_t horizon) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw BanditError(ErrorCode::DomainError, "gamma must lie in (0, 1)");
    if (!(delta_min > 0.0)) throw BanditError(ErrorCode::DomainError, "delta_min must be positive");
    if (horizon == 0) throw BanditError(ErrorCode::DomainError, "horizon must be positive");
    const double ratio = 4.0 / delta_min;
    const double first = std::pow(static_cast<double>(horizon), gamma);
    std::vector<std::uint64_t> out;
    std::uint64_t used = 0;
    for (std::size_t i = 0; used < horizon; ++i) {
        const double exact = std::ceil(first * std::pow(ratio, static_cast<double>(i)));
        const std::uint64_t remaining = horizon - used;
        const bool truncated = exact >= static_cast<double>(remaining);
        const std::uint64_t len = truncated ? remaining : static_cast<std::uint64_t>(exact);
        if (!truncated && static_cast<double>(len) < 3.0 / delta_min * static_cast<double>(used))
            throw BanditError(ErrorCode::DomainError, "interval schedule violates the growth condition");
        out.push_back(len);
        used += len;
    }
    return out;
}

LowerBoundPair make_lowerbound_pair(const BanditInstance& instance, double gamma, std::uint64_t horizon,
                                    const DesignMatrix& g_i, std::size_t x_prime, std::size_t switch_interval,
                                    double c_reg) {
    if (instance.theta().norm() > 0.25 + kMeanSlack)
        throw BanditError(ErrorCode::MeanOutOfRange, "the lower-bound construction needs ||theta|| <= 1/4");
    if (x_prime >= instance.size() || x_prime == instance.optimal_index())
        throw BanditError(ErrorCode::DomainError, "x' must be a suboptimal arm");
    Eigen::LLT<Matrix> llt(g_i.matrix());
    if (llt.info() != Eigen::Success) throw BanditError(ErrorCode::NotPD, "G_i must be positive definite");

    LowerBoundPair pair;
    pair.theta = instance.theta();
    pair.x_star = instance.optimal_index();
    pair.x_prime = x_prime;
    pair.gamma = gamma;
    pair.horizon = horizon;
    pair.intervals = lowerbound_intervals(instance.delta_min(), gamma, horizon);
    if (switch_interval < 1 || switch_interval > pair.intervals.size())
        throw BanditError(ErrorCode::DomainError, "switch interval out of range");
    pair.switch_interval = switch_interval;
    pair.c_reg = c_reg;
    pair.V = c_reg * std::log(static_cast<double>(horizon));
    pair.U = pair.V * static_cast<double>(pair.intervals.size());

    const Vector diff = instance.actions().arm(x_prime) - instance.actions().arm(pair.x_star);
    const Vector g_diff = llt.solve(diff);
    const double gap = instance.gap(x_prime);
    pair.theta_prime = pair.theta - (2.0 * gap / diff.dot(g_diff)) * g_diff;

    const double flipped = diff.dot(pair.theta_prime);
    if (std::abs(flipped + gap) > 1e-10)
        throw BanditError(ErrorCode::DomainError, "theta' does not make x' better than x* by its gap");
    if (max_abs_inner(instance.actions(), pair.theta_prime) > 0.75 + 1e-10)
        throw BanditError(ErrorCode::MeanOutOfRange, "theta' pushes a mean outside [-3/4, 3/4]");
    return pair;
}

double kl_bernoulli(double p, double q) {
    if (!(std::abs(p) < 1.0) || !(std::abs(q) < 1.0)) throw BanditError(ErrorCode::DomainError, "kl needs means in (-1, 1)");
    return 0.5 * (1.0 + p) * std::log((1.0 + p) / (1.0 + q)) + 0.5 * (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

double trajectory_kl(std::span<const double> counts, const ActionSet& actions, const Vector& theta,
                     const Vector& theta_prime) {
    if (counts.size() != actions.size()) throw BanditError(ErrorCode::LengthMismatch, "one pull count per arm expected");
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0.0) throw BanditError(ErrorCode::DomainError, "pull counts must be nonnegative");
        const Vector x = actions.arm(i);
        total += counts[i] * kl_bernoulli(x.dot(theta), x.dot(theta_prime));
    }
    return total;
}

AdversarialSequence AdversarialSequence::switching(const Vector& theta, std::uint64_t switch_round) {
    AdversarialSequence s;
    s.kind_ = Kind::Switch;
    s.theta_ = theta;
    s.period_ = switch_round;
    return s;
}

AdversarialSequence AdversarialSequence::sinusoid(const BanditInstance& instance, const Vector& direction,
                                                  double amplitude, std::uint64_t period) {
    if (period == 0) throw BanditError(ErrorCode::DomainError, "sinusoid period must be positive");
    if (direction.size() != instance.theta().size())
        throw BanditError(ErrorCode::LengthMismatch, "sinusoid direction has the wrong dimension");
    if (!(direction.norm() > 0.0)) throw BanditError(ErrorCode::DomainError, "sinusoid direction must be nonzero");
    AdversarialSequence s;
    s.kind_ = Kind::Sinusoid;
    s.theta_ = instance.theta();
    s.direction_ = direction.normalized();
    s.amplitude_ = amplitude;
    s.period_ = period;
    const double base = max_abs_inner(instance.actions(), s.theta_);
    if (!(std::abs(amplitude) <= 1.0 - base + kMeanSlack))
        throw BanditError(ErrorCode::AdmissibilityViolation, "sinusoid amplitude exceeds 1 - max |<x, theta>|");
    return s;
}

AdversarialSequence AdversarialSequence::lowerbound(std::shared_ptr<const LowerBoundPair> pair) {
    if (!pair) throw BanditError(ErrorCode::DomainError, "missing lower-bound pair");
    AdversarialSequence s;
    s.kind_ = Kind::LowerBound;
    s.theta_ = pair->theta;
    s.pair_ = std::move(pair);
    return s;
}

Vector AdversarialSequence::at(std::uint64_t t) const {
    switch (kind_) {
        case Kind::Switch:
            return t < period_ ? theta_ : Vector(-theta_);
        case Kind::Sinusoid: {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(t % period_) / static_cast<double>(period_);
            return theta_ + amplitude_ * std::sin(phase) * direction_;
        }
        case Kind::LowerBound:
            return t >= pair_->interval_start(pair_->switch_interval) ? pair_->theta_prime : pair_->theta;
    }
    return theta_;
}

Environment Environment::stochastic(BanditInstance instance, NoiseModel noise) {
    return Environment(std::move(instance), noise);
}

Environment Environment::corrupted(BanditInstance instance, NoiseModel noise, CorruptionSchedule schedule) {
    Environment env(std::move(instance), noise);
    env.corruption_ = std::make_shared<const CorruptionSchedule>(std::move(schedule));
    return env;
}

Environment Environment::adversarial(BanditInstance instance, NoiseModel noise, AdversarialSequence sequence) {
    Environment env(std::move(instance), noise);
    env.sequence_ = std::make_shared<const AdversarialSequence>(std::move(sequence));
    return env;
}

Vector Environment::loss(std::uint64_t t) const {
    if (sequence_) return sequence_->at(t);
    if (corruption_) return instance_.theta() + corruption_->at(t);
    return instance_.theta();
}

double Environment::mean(std::uint64_t t, std::size_t arm) const {
    if (!sequence_ && !corruption_) return instance_.mean(arm);
    return actions().arm(arm).dot(loss(t));
}

double Environment::observe(std::uint64_t seed, std::uint64_t t, std::size_t arm) const {
    return draw_observation(mean(t, arm), noise_, RngStream::uniform_at(seed, kEnvironmentStream, t));
}

}  // namespace banditlab
