#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace banditlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kTolerance = 1e-9;
inline constexpr double kOptimumTieTolerance = 1e-12;
inline constexpr double kNormSlack = 1e-12;

/// Finite arm set in R^d. Arms are addressed by their index in construction
/// order; every per-arm quantity in the library is index-keyed.
class ActionSet {
public:
    /// Validates norms, duplicates and rank. Throws BanditError.
    static ActionSet validate(const std::vector<Vector>& actions);

    std::size_t size() const noexcept { return static_cast<std::size_t>(arms_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(arms_.cols()); }

    /// Row i is arm i.
    const Matrix& matrix() const noexcept { return arms_; }
    Vector arm(std::size_t i) const { return arms_.row(static_cast<Eigen::Index>(i)).transpose(); }

private:
    explicit ActionSet(Matrix arms) : arms_(std::move(arms)) {}
    Matrix arms_;
};

/// Stochastic instance: arm set plus the loss parameter theta. Lower loss is
/// better, so the optimal arm minimises <x, theta>.
class BanditInstance {
public:
    static BanditInstance make(ActionSet actions, Vector theta);

    const ActionSet& actions() const noexcept { return actions_; }
    const Vector& theta() const noexcept { return theta_; }
    const std::vector<double>& gaps() const noexcept { return gaps_; }
    double gap(std::size_t arm) const { return gaps_.at(arm); }
    std::size_t optimal_index() const noexcept { return optimal_; }
    double delta_min() const noexcept { return delta_min_; }
    double mean(std::size_t arm) const { return means_.at(arm); }
    std::size_t size() const noexcept { return actions_.size(); }
    std::size_t dim() const noexcept { return actions_.dim(); }

private:
    BanditInstance(ActionSet actions, Vector theta) : actions_(std::move(actions)), theta_(std::move(theta)) {}

    ActionSet actions_;
    Vector theta_;
    std::vector<double> means_;
    std::vector<double> gaps_;
    std::size_t optimal_ = 0;
    double delta_min_ = 0.0;
};

/// Probability vector over arms.
class ArmDistribution {
public:
    ArmDistribution() = default;
    /// Throws DomainError when weights are negative or do not sum to one
    /// within kTolerance. Tiny negative noise (> -1e-15) is clamped.
    explicit ArmDistribution(std::vector<double> weights);

    static ArmDistribution uniform(std::size_t n);
    static ArmDistribution point_mass(std::size_t n, std::size_t arm);
    /// (1 - w) * a + w * b
    static ArmDistribution mix(const ArmDistribution& a, const ArmDistribution& b, double w);

    const std::vector<double>& weights() const noexcept { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const noexcept { return weights_.size(); }

    /// Inverse-CDF draw from one uniform in [0, 1).
    std::size_t sample(double u) const;

private:
    std::vector<double> weights_;
};

/// Counter-based generator: the value at (seed, stream, counter) is a pure
/// function of the triple, so any (trial, round) draw can be addressed
/// directly and results do not depend on scheduling.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    static std::uint64_t at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;
    static double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

    std::uint64_t next_u64() noexcept { return at(seed_, stream_, counter_++); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    RngStream split(std::uint64_t child) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }
    std::uint64_t counter() const noexcept { return counter_; }
    void seek(std::uint64_t counter) noexcept { counter_ = counter; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
};

struct RoundRecord {
    std::uint64_t t = 0;
    std::size_t arm = 0;
    double y = 0.0;
    int phase = 0;
    std::int64_t block_or_epoch = 0;
    double pseudo_regret = 0.0;
    double pseudo_regret_cum = 0.0;
    double adv_regret_cum = 0.0;
    std::vector<double> estimates;  // optional per-arm snapshot, not exported
};

struct Trace {
    std::vector<RoundRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
    std::vector<std::size_t> arms() const;
};

/// Prefix sums of the gaps of the pulled arms.
std::vector<double> pseudo_regret(std::span<const std::size_t> arms, const BanditInstance& instance);
std::vector<double> pseudo_regret(const Trace& trace, const BanditInstance& instance);

/// max over comparators x of sum_t <x_t - x, loss_t>. Throws LengthMismatch.
double adversarial_regret(std::span<const std::size_t> arms, std::span<const Vector> losses,
                          const ActionSet& actions);

/// Streaming version of adversarial_regret, one round at a time.
class AdversarialRegretTracker {
public:
    explicit AdversarialRegretTracker(const ActionSet& actions);
    /// Adds one round and returns the regret so far.
    double add(std::size_t arm, const Vector& loss);
    double value() const noexcept;

private:
    Matrix arms_;
    Vector comparator_cum_;
    double learner_cum_ = 0.0;
};

}  // namespace banditlab
