#include "core.hpp"

#include "errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

namespace banditlab {

ActionSet ActionSet::validate(const std::vector<Vector>& actions) {
    if (actions.empty()) throw BanditError(ErrorCode::RankDeficient, "empty action list");
    const auto d = actions.front().size();
    if (d == 0) throw BanditError(ErrorCode::RankDeficient, "zero-dimensional actions");
    for (const auto& a : actions) {
        if (a.size() != d) throw BanditError(ErrorCode::LengthMismatch, "actions have different lengths");
        if (!a.allFinite()) throw BanditError(ErrorCode::NormViolation, "non-finite action entry");
    }
    if (actions.size() < 2) throw BanditError(ErrorCode::RankDeficient, "need at least two arms");

    Matrix m(static_cast<Eigen::Index>(actions.size()), d);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const double norm = actions[i].norm();
        if (norm > 1.0 + kNormSlack) {
            std::ostringstream os;
            os << "arm " << i << " has norm " << norm;
            throw BanditError(ErrorCode::NormViolation, os.str());
        }
        m.row(static_cast<Eigen::Index>(i)) = actions[i].transpose();
    }
    for (std::size_t i = 0; i < actions.size(); ++i) {
        for (std::size_t j = i + 1; j < actions.size(); ++j) {
            if ((actions[i] - actions[j]).cwiseAbs().maxCoeff() <= kOptimumTieTolerance) {
                std::ostringstream os;
                os << "arms " << i << " and " << j << " coincide";
                throw BanditError(ErrorCode::DuplicateArm, os.str());
            }
        }
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(1e-10);
    if (qr.rank() != d) {
        std::ostringstream os;
        os << "actions span rank " << qr.rank() << " < " << d;
        throw BanditError(ErrorCode::RankDeficient, os.str());
    }
    return ActionSet(std::move(m));
}

BanditInstance BanditInstance::make(ActionSet actions, Vector theta) {
    if (static_cast<std::size_t>(theta.size()) != actions.dim())
        throw BanditError(ErrorCode::LengthMismatch, "theta dimension does not match actions");
    BanditInstance inst(std::move(actions), std::move(theta));
    const auto n = inst.actions_.size();
    inst.means_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = inst.actions_.matrix().row(static_cast<Eigen::Index>(i)).dot(inst.theta_);
        if (!(std::abs(mu) <= 1.0 + kNormSlack)) {
            std::ostringstream os;
            os << "arm " << i << " has mean " << mu << " outside [-1,1]";
            throw BanditError(ErrorCode::MeanOutOfRange, os.str());
        }
        inst.means_[i] = mu;
    }
    const auto best = std::min_element(inst.means_.begin(), inst.means_.end());
    inst.optimal_ = static_cast<std::size_t>(best - inst.means_.begin());
    inst.gaps_.resize(n);
    inst.delta_min_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        inst.gaps_[i] = inst.means_[i] - *best;
        if (i == inst.optimal_) continue;
        if (inst.gaps_[i] <= kOptimumTieTolerance) {
            std::ostringstream os;
            os << "arms " << inst.optimal_ << " and " << i << " tie for the optimum";
            throw BanditError(ErrorCode::NonUniqueOptimum, os.str());
        }
        inst.delta_min_ = std::min(inst.delta_min_, inst.gaps_[i]);
    }
    inst.gaps_[inst.optimal_] = 0.0;
    return inst;
}

ArmDistribution::ArmDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw BanditError(ErrorCode::DomainError, "empty distribution");
    double sum = 0.0;
    for (auto& w : weights_) {
        if (!std::isfinite(w) || w < -1e-15) throw BanditError(ErrorCode::DomainError, "negative or non-finite weight");
        w = std::max(w, 0.0);
        sum += w;
    }
    if (std::abs(sum - 1.0) > kTolerance) {
        std::ostringstream os;
        os << "weights sum to " << sum;
        throw BanditError(ErrorCode::DomainError, os.str());
    }
}

ArmDistribution ArmDistribution::uniform(std::size_t n) {
    return ArmDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ArmDistribution ArmDistribution::point_mass(std::size_t n, std::size_t arm) {
    std::vector<double> w(n, 0.0);
    w.at(arm) = 1.0;
    return ArmDistribution(std::move(w));
}

ArmDistribution ArmDistribution::mix(const ArmDistribution& a, const ArmDistribution& b, double w) {
    if (a.size() != b.size()) throw BanditError(ErrorCode::LengthMismatch, "mixing distributions of different size");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
    return ArmDistribution(std::move(out));
}

std::size_t ArmDistribution::sample(double u) const {
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] <= 0.0) continue;
        last_positive = i;
        cum += weights_[i];
        if (u < cum) return i;
    }
    return last_positive;  // u lands in the rounding slack above the final cumulative weight
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    return splitmix64(key + splitmix64(counter));
}

double RngStream::uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
    return static_cast<double>(at(seed, stream, counter) >> 11) * 0x1.0p-53;
}

double RngStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RngStream RngStream::split(std::uint64_t child) const noexcept {
    return RngStream(seed_, splitmix64(stream_ ^ splitmix64(child + 0x2545f4914f6cdd1dULL)));
}

std::vector<std::size_t> Trace::arms() const {
    std::vector<std::size_t> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.arm);
    return out;
}

std::vector<double> pseudo_regret(std::span<const std::size_t> arms, const BanditInstance& instance) {
    std::vector<double> out;
    out.reserve(arms.size());
    double cum = 0.0;
    for (auto a : arms) {
        cum += instance.gap(a);
        out.push_back(cum);
    }
    return out;
}

std::vector<double> pseudo_regret(const Trace& trace, const BanditInstance& instance) {
    const auto arms = trace.arms();
    return pseudo_regret(std::span<const std::size_t>(arms), instance);
}

double adversarial_regret(std::span<const std::size_t> arms, std::span<const Vector> losses,
                          const ActionSet& actions) {
    if (arms.size() != losses.size()) throw BanditError(ErrorCode::LengthMismatch, "arms and losses differ in length");
    AdversarialRegretTracker tracker(actions);
    for (std::size_t t = 0; t < arms.size(); ++t) tracker.add(arms[t], losses[t]);
    return tracker.value();
}

AdversarialRegretTracker::AdversarialRegretTracker(const ActionSet& actions)
    : arms_(actions.matrix()), comparator_cum_(Vector::Zero(arms_.rows())) {}

double AdversarialRegretTracker::add(std::size_t arm, const Vector& loss) {
    if (loss.size() != arms_.cols()) throw BanditError(ErrorCode::LengthMismatch, "loss vector dimension");
    if (arm >= static_cast<std::size_t>(arms_.rows())) throw BanditError(ErrorCode::DomainError, "arm index out of range");
    const Vector per_arm = arms_ * loss;
    comparator_cum_ += per_arm;
    learner_cum_ += per_arm(static_cast<Eigen::Index>(arm));
    return value();
}

double AdversarialRegretTracker::value() const noexcept {
    if (comparator_cum_.size() == 0) return 0.0;
    return learner_cum_ - comparator_cum_.minCoeff();
}

}  // namespace banditlab
